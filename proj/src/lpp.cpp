#include "otdoa/lpp.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <iomanip>
#include <sstream>

namespace otdoa::lpp {

namespace {

// ---- byte writer ---------------------------------------------------------

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v), 4); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
    void bytes(const std::vector<std::uint8_t>& b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    void field(std::uint8_t tag, const Writer& value) {
        u8(tag);
        u32(static_cast<std::uint32_t>(value.buf_.size()));
        bytes(value.buf_);
    }
    void field_i32(std::uint8_t tag, std::int32_t v) {
        Writer w;
        w.i32(v);
        field(tag, w);
    }
    void field_u32(std::uint8_t tag, std::uint32_t v) {
        Writer w;
        w.u32(v);
        field(tag, w);
    }
    void field_u8(std::uint8_t tag, std::uint8_t v) {
        Writer w;
        w.u8(v);
        field(tag, w);
    }
    void field_f64(std::uint8_t tag, double v) {
        Writer w;
        w.f64(v);
        field(tag, w);
    }
    // Bit strings: u16 bit count followed by the bits packed MSB first.
    void field_bits(std::uint8_t tag, const BitString& bits) {
        Writer w;
        w.u16(static_cast<std::uint16_t>(bits.size()));
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) acc |= static_cast<std::uint8_t>(0x80u >> (i % 8));
            if (i % 8 == 7) {
                w.u8(acc);
                acc = 0;
            }
        }
        if (bits.size() % 8 != 0) w.u8(acc);
        field(tag, w);
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }

private:
    void le(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> buf_;
};

// ---- byte reader ---------------------------------------------------------

struct Field {
    std::uint8_t tag;
    std::size_t offset;  // offset of the value within the whole message
    std::span<const std::uint8_t> value;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, std::size_t base) : data_(data), base_(base) {}

    bool done() const { return pos_ >= data_.size(); }
    std::size_t offset() const { return base_ + pos_; }

    std::uint64_t le(int n, const char* what) {
        if (data_.size() - pos_ < static_cast<std::size_t>(n)) {
            throw MalformedMessage(offset(), std::string("truncated ") + what);
        }
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    Field field() {
        const std::size_t at = offset();
        const auto tag = static_cast<std::uint8_t>(le(1, "field tag"));
        const auto len = static_cast<std::size_t>(le(4, "field length"));
        if (data_.size() - pos_ < len) {
            throw MalformedMessage(at, "field length " + std::to_string(len) + " exceeds remaining " +
                                           std::to_string(data_.size() - pos_) + " bytes");
        }
        Field f{tag, offset(), data_.subspan(pos_, len)};
        pos_ += len;
        return f;
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

std::vector<Field> fields_of(const Field& parent) {
    Reader r(parent.value, parent.offset);
    std::vector<Field> out;
    while (!r.done()) out.push_back(r.field());
    return out;
}

std::uint64_t scalar(const Field& f, int n) {
    if (f.value.size() != static_cast<std::size_t>(n)) {
        throw MalformedMessage(f.offset, "field " + std::to_string(f.tag) + " expects " + std::to_string(n) +
                                             " bytes, has " + std::to_string(f.value.size()));
    }
    Reader r(f.value, f.offset);
    return r.le(n, "scalar");
}

std::int32_t as_i32(const Field& f) { return static_cast<std::int32_t>(static_cast<std::uint32_t>(scalar(f, 4))); }
std::uint32_t as_u32(const Field& f) { return static_cast<std::uint32_t>(scalar(f, 4)); }
std::uint8_t as_u8(const Field& f) { return static_cast<std::uint8_t>(scalar(f, 1)); }
double as_f64(const Field& f) { return std::bit_cast<double>(scalar(f, 8)); }

BitString as_bits(const Field& f) {
    Reader r(f.value, f.offset);
    const auto n = static_cast<std::size_t>(r.le(2, "bit count"));
    const std::size_t nbytes = (n + 7) / 8;
    if (f.value.size() != 2 + nbytes) throw MalformedMessage(f.offset, "bit string length mismatch");
    BitString bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (f.value[2 + i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

// Collects fields of one structure, rejecting unknown or duplicated tags.
class FieldSet {
public:
    FieldSet(const Field& parent, std::initializer_list<std::uint8_t> singles, std::initializer_list<std::uint8_t> repeated = {})
        : parent_offset_(parent.offset) {
        for (const auto& f : fields_of(parent)) {
            const bool single = std::find(singles.begin(), singles.end(), f.tag) != singles.end();
            const bool rep = std::find(repeated.begin(), repeated.end(), f.tag) != repeated.end();
            if (!single && !rep) throw MalformedMessage(f.offset - 5, "unknown field tag " + std::to_string(f.tag));
            if (single && has(f.tag)) throw MalformedMessage(f.offset - 5, "duplicate field tag " + std::to_string(f.tag));
            fields_.push_back(f);
        }
    }

    bool has(std::uint8_t tag) const {
        return std::any_of(fields_.begin(), fields_.end(), [&](const Field& f) { return f.tag == tag; });
    }
    const Field& get(std::uint8_t tag) const {
        for (const auto& f : fields_) {
            if (f.tag == tag) return f;
        }
        throw MalformedMessage(parent_offset_, "missing field tag " + std::to_string(tag));
    }
    std::vector<Field> all(std::uint8_t tag) const {
        std::vector<Field> out;
        for (const auto& f : fields_) {
            if (f.tag == tag) out.push_back(f);
        }
        return out;
    }

private:
    std::size_t parent_offset_;
    std::vector<Field> fields_;
};

// ---- PRS configuration ---------------------------------------------------

enum : std::uint8_t { kFamilyLte = 1, kFamilyLtem = 2, kFamilyNprs = 3 };

Writer encode_muting(const MutingPattern& m) {
    Writer w;
    w.field_bits(1, m.bits);
    return w;
}

MutingPattern decode_muting(const Field& f) {
    FieldSet s(f, {1});
    return MutingPattern{as_bits(s.get(1))};
}

Writer encode_prs(const PrsConfig& cfg) {
    Writer body;
    std::uint8_t family = 0;
    if (const auto* c = std::get_if<LtePrsConfig>(&cfg)) {
        family = kFamilyLte;
        body.field_i32(1, c->bandwidth_prbs);
        body.field_i32(2, c->carrier_prbs);
        body.field_i32(3, c->period_T_prs);
        body.field_i32(4, c->occasion_length);
        body.field_i32(5, c->subframe_offset);
        if (c->muting) body.field(6, encode_muting(*c->muting));
        body.field_i32(7, c->physical_cell_id);
    } else if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        family = kFamilyLtem;
        body.field_i32(1, m->bandwidth_prbs);
        body.field_i32(2, m->carrier_prbs);
        body.field_i32(3, m->period_T_prs);
        body.field_i32(4, m->occasion_length);
        if (m->occasion_interval) body.field_i32(5, *m->occasion_interval);
        body.field_i32(6, m->subframe_offset);
        body.field_i32(7, m->prs_id);
        if (m->hopping) {
            Writer h;
            h.field_i32(1, m->hopping->n_bands);
            for (int off : m->hopping->band_prb_offsets) h.field_i32(2, off);
            body.field(8, h);
        }
        if (m->muting) body.field(9, encode_muting(*m->muting));
        if (m->muting_group_size) body.field_i32(10, *m->muting_group_size);
    } else {
        const auto& n = std::get<NprsConfig>(cfg);
        family = kFamilyNprs;
        if (n.part_a) {
            Writer a;
            a.field_bits(1, n.part_a->nprs_bitmap);
            if (n.part_a->muting) a.field(2, encode_muting(*n.part_a->muting));
            body.field(1, a);
        }
        if (n.part_b) {
            Writer b;
            b.field_i32(1, n.part_b->period_T_prs);
            b.field_i32(2, n.part_b->offset_eighths);
            b.field_i32(3, n.part_b->occasion_length);
            if (n.part_b->muting) b.field(4, encode_muting(*n.part_b->muting));
            body.field(2, b);
        }
        body.field_i32(3, n.prs_id);
        body.field_u8(4, static_cast<std::uint8_t>(n.deployment_mode));
        body.field_i32(5, n.carrier_prbs);
        body.field_i32(6, n.inband_prb_index);
    }
    Writer w;
    w.field(family, body);
    return w;
}

PrsConfig decode_prs(const Field& f) {
    const auto outer = fields_of(f);
    if (outer.size() != 1) throw MalformedMessage(f.offset, "PRS config must hold exactly one family field");
    const Field& body = outer.front();
    switch (body.tag) {
        case kFamilyLte: {
            FieldSet s(body, {1, 2, 3, 4, 5, 6, 7});
            LtePrsConfig c;
            c.bandwidth_prbs = as_i32(s.get(1));
            c.carrier_prbs = as_i32(s.get(2));
            c.period_T_prs = as_i32(s.get(3));
            c.occasion_length = as_i32(s.get(4));
            c.subframe_offset = as_i32(s.get(5));
            if (s.has(6)) c.muting = decode_muting(s.get(6));
            c.physical_cell_id = as_i32(s.get(7));
            return c;
        }
        case kFamilyLtem: {
            FieldSet s(body, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
            LtemPrsConfig c;
            c.bandwidth_prbs = as_i32(s.get(1));
            c.carrier_prbs = as_i32(s.get(2));
            c.period_T_prs = as_i32(s.get(3));
            c.occasion_length = as_i32(s.get(4));
            if (s.has(5)) c.occasion_interval = as_i32(s.get(5));
            c.subframe_offset = as_i32(s.get(6));
            c.prs_id = as_i32(s.get(7));
            if (s.has(8)) {
                FieldSet h(s.get(8), {1}, {2});
                HoppingConfig hop;
                hop.n_bands = as_i32(h.get(1));
                for (const auto& o : h.all(2)) hop.band_prb_offsets.push_back(as_i32(o));
                c.hopping = hop;
            }
            if (s.has(9)) c.muting = decode_muting(s.get(9));
            if (s.has(10)) c.muting_group_size = as_i32(s.get(10));
            return c;
        }
        case kFamilyNprs: {
            FieldSet s(body, {1, 2, 3, 4, 5, 6});
            NprsConfig c;
            if (s.has(1)) {
                FieldSet a(s.get(1), {1, 2});
                NprsBitmapConfig part;
                part.nprs_bitmap = as_bits(a.get(1));
                if (a.has(2)) part.muting = decode_muting(a.get(2));
                c.part_a = part;
            }
            if (s.has(2)) {
                FieldSet b(s.get(2), {1, 2, 3, 4});
                NprsPeriodicConfig part;
                part.period_T_prs = as_i32(b.get(1));
                part.offset_eighths = as_i32(b.get(2));
                part.occasion_length = as_i32(b.get(3));
                if (b.has(4)) part.muting = decode_muting(b.get(4));
                c.part_b = part;
            }
            c.prs_id = as_i32(s.get(3));
            const auto mode = as_u8(s.get(4));
            if (mode > static_cast<std::uint8_t>(DeploymentMode::standalone)) {
                throw MalformedMessage(s.get(4).offset, "unknown deployment mode " + std::to_string(mode));
            }
            c.deployment_mode = static_cast<DeploymentMode>(mode);
            c.carrier_prbs = as_i32(s.get(5));
            c.inband_prb_index = as_i32(s.get(6));
            return c;
        }
        default:
            throw MalformedMessage(body.offset - 5, "unknown PRS family " + std::to_string(body.tag));
    }
}

Writer encode_cell(const CellAssistance& cell) {
    Writer w;
    w.field_i32(1, cell.cell_id);
    w.field_u32(2, cell.band);
    w.field(3, encode_prs(cell.prs));
    return w;
}

CellAssistance decode_cell(const Field& f) {
    FieldSet s(f, {1, 2, 3});
    CellAssistance c;
    c.cell_id = as_i32(s.get(1));
    const auto band = as_u32(s.get(2));
    if (band > 0xFFFFu) throw MalformedMessage(s.get(2).offset, "band number out of range");
    c.band = static_cast<std::uint16_t>(band);
    c.prs = decode_prs(s.get(3));
    return c;
}

Writer encode_rstd(const RstdMeasurement& m) {
    Writer w;
    w.field_i32(1, m.neighbor_cell_id);
    w.field_i32(2, m.reference_cell_id);
    w.field_f64(3, m.rstd_s);
    w.field_f64(4, m.quality_db);
    return w;
}

RstdMeasurement decode_rstd(const Field& f) {
    FieldSet s(f, {1, 2, 3, 4});
    return {as_i32(s.get(1)), as_i32(s.get(2)), as_f64(s.get(3)), as_f64(s.get(4))};
}

// ---- message bodies ------------------------------------------------------

Writer encode_body(const LppMessage& msg) {
    Writer w;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            w.field_u32(1, m.transaction_id);
            if constexpr (std::is_same_v<T, ProvideCapabilities>) {
                for (auto band : m.supported_bands) w.field_u32(2, band);
                w.field_u8(3, static_cast<std::uint8_t>(m.max_bandwidth));
                w.field_u8(4, m.inter_frequency_rstd ? 1 : 0);
            } else if constexpr (std::is_same_v<T, ProvideAssistanceData>) {
                w.field(2, encode_cell(m.reference));
                Writer count;
                count.u32(static_cast<std::uint32_t>(m.neighbors.size()));
                w.field(3, count);
                for (const auto& n : m.neighbors) w.field(4, encode_cell(n));
            } else if constexpr (std::is_same_v<T, RequestLocationInformation>) {
                w.field_u32(2, m.response_time_subframes);
            } else if constexpr (std::is_same_v<T, ProvideLocationInformation>) {
                for (const auto& r : m.measurements) w.field(2, encode_rstd(r));
            }
        },
        msg);
    return w;
}

LppMessage decode_body(MessageType type, const Field& body) {
    switch (type) {
        case MessageType::request_capabilities: {
            FieldSet s(body, {1});
            return RequestCapabilities{as_u32(s.get(1))};
        }
        case MessageType::provide_capabilities: {
            FieldSet s(body, {1, 3, 4}, {2});
            ProvideCapabilities m;
            m.transaction_id = as_u32(s.get(1));
            for (const auto& f : s.all(2)) {
                const auto band = as_u32(f);
                if (band > 0xFFFFu) throw MalformedMessage(f.offset, "band number out of range");
                m.supported_bands.push_back(static_cast<std::uint16_t>(band));
            }
            const auto bw = as_u8(s.get(3));
            if (bw > static_cast<std::uint8_t>(BandwidthClass::wideband)) {
                throw MalformedMessage(s.get(3).offset, "unknown bandwidth class " + std::to_string(bw));
            }
            m.max_bandwidth = static_cast<BandwidthClass>(bw);
            const auto flag = as_u8(s.get(4));
            if (flag > 1) throw MalformedMessage(s.get(4).offset, "boolean flag not 0/1");
            m.inter_frequency_rstd = flag == 1;
            return m;
        }
        case MessageType::provide_assistance_data: {
            FieldSet s(body, {1, 2, 3}, {4});
            ProvideAssistanceData m;
            m.transaction_id = as_u32(s.get(1));
            m.reference = decode_cell(s.get(2));
            const auto count = as_u32(s.get(3));
            const auto cells = s.all(4);
            if (cells.size() != count) {
                throw MalformedMessage(s.get(3).offset, "neighbor count " + std::to_string(count) + " but " +
                                                            std::to_string(cells.size()) + " neighbor fields");
            }
            for (const auto& f : cells) m.neighbors.push_back(decode_cell(f));
            return m;
        }
        case MessageType::request_location_information: {
            FieldSet s(body, {1, 2});
            return RequestLocationInformation{as_u32(s.get(1)), as_u32(s.get(2))};
        }
        case MessageType::provide_location_information: {
            FieldSet s(body, {1}, {2});
            ProvideLocationInformation m;
            m.transaction_id = as_u32(s.get(1));
            for (const auto& f : s.all(2)) m.measurements.push_back(decode_rstd(f));
            return m;
        }
    }
    throw MalformedMessage(1, "unknown message type");
}

std::string bits_text(const BitString& b) { return format_bits(b); }

std::string describe_prs(const PrsConfig& cfg) {
    std::ostringstream os;
    if (const auto* c = std::get_if<LtePrsConfig>(&cfg)) {
        os << "LTE{pci=" << c->physical_cell_id << " bw=" << c->bandwidth_prbs << " T=" << c->period_T_prs
           << " len=" << c->occasion_length << " off=" << c->subframe_offset;
        if (c->muting) os << " muting=" << bits_text(c->muting->bits);
        os << "}";
    } else if (const auto* m = std::get_if<LtemPrsConfig>(&cfg)) {
        os << "LTE-M{prs_id=" << m->prs_id << " bw=" << m->bandwidth_prbs << " T=" << m->period_T_prs
           << " len=" << m->occasion_length << " off=" << m->subframe_offset;
        if (m->occasion_interval) os << " interval=" << *m->occasion_interval;
        if (m->hopping) os << " hopping_bands=" << m->hopping->n_bands;
        if (m->muting) os << " muting=" << bits_text(m->muting->bits);
        if (m->muting_group_size) os << " group=" << *m->muting_group_size;
        os << "}";
    } else {
        const auto& n = std::get<NprsConfig>(cfg);
        os << "NPRS{prs_id=" << n.prs_id << " mode=" << to_string(n.deployment_mode);
        if (n.part_a) os << " partA=" << bits_text(n.part_a->nprs_bitmap);
        if (n.part_b) {
            os << " partB{T=" << n.part_b->period_T_prs << " off=" << n.part_b->offset_eighths << "/8 len="
               << n.part_b->occasion_length << "}";
        }
        os << "}";
    }
    return os.str();
}

}  // namespace

std::string to_string(MessageType type) {
    switch (type) {
        case MessageType::request_capabilities: return "RequestCapabilities";
        case MessageType::provide_capabilities: return "ProvideCapabilities";
        case MessageType::provide_assistance_data: return "ProvideAssistanceData";
        case MessageType::request_location_information: return "RequestLocationInformation";
        case MessageType::provide_location_information: return "ProvideLocationInformation";
    }
    return "Unknown";
}

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::idle: return "Idle";
        case Phase::capabilities_exchanged: return "CapabilitiesExchanged";
        case Phase::assistance_delivered: return "AssistanceDelivered";
        case Phase::awaiting_location: return "AwaitingLocation";
        case Phase::done: return "Done";
    }
    return "Unknown";
}

MessageType type_of(const LppMessage& msg) { return static_cast<MessageType>(msg.index() + 1); }

MalformedMessage::MalformedMessage(std::size_t offset, const std::string& reason)
    : Error("MalformedMessage at byte " + std::to_string(offset) + ": " + reason), offset_(offset) {}

std::vector<std::uint8_t> encode(const LppMessage& msg) {
    const Writer body = encode_body(msg);
    Writer w;
    w.u8(kWireVersion);
    w.u8(static_cast<std::uint8_t>(type_of(msg)));
    w.u32(static_cast<std::uint32_t>(body.data().size()));
    w.bytes(body.data());
    return w.data();
}

LppMessage decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes, 0);
    const auto version = r.le(1, "version byte");
    if (version != kWireVersion) throw MalformedMessage(0, "unsupported version " + std::to_string(version));
    const auto type = r.le(1, "message type");
    if (type < 1 || type > 5) throw MalformedMessage(1, "unknown message type " + std::to_string(type));
    const auto len = static_cast<std::size_t>(r.le(4, "body length"));
    const std::size_t header = 6;
    if (bytes.size() - header < len) {
        throw MalformedMessage(bytes.size(), "body truncated: declared " + std::to_string(len) + " bytes, have " +
                                                 std::to_string(bytes.size() - header));
    }
    if (bytes.size() - header > len) throw MalformedMessage(header + len, "trailing bytes after body");
    const Field body{0, header, bytes.subspan(header, len)};
    return decode_body(static_cast<MessageType>(type), body);
}

std::string describe(const LppMessage& msg) {
    std::ostringstream os;
    os << to_string(type_of(msg));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            os << " transaction=" << m.transaction_id;
            if constexpr (std::is_same_v<T, ProvideCapabilities>) {
                os << " bands=[";
                for (std::size_t i = 0; i < m.supported_bands.size(); ++i) os << (i ? "," : "") << m.supported_bands[i];
                static const char* classes[] = {"M1", "M2", "NB", "wideband"};
                os << "] max_bandwidth=" << classes[static_cast<int>(m.max_bandwidth)]
                   << " inter_frequency_rstd=" << (m.inter_frequency_rstd ? "true" : "false");
            } else if constexpr (std::is_same_v<T, ProvideAssistanceData>) {
                os << "\n  reference cell " << m.reference.cell_id << " band " << m.reference.band << " "
                   << describe_prs(m.reference.prs);
                os << "\n  neighbors " << m.neighbors.size();
                for (const auto& n : m.neighbors) {
                    os << "\n  neighbor cell " << n.cell_id << " band " << n.band << " " << describe_prs(n.prs);
                }
            } else if constexpr (std::is_same_v<T, RequestLocationInformation>) {
                os << " response_time_subframes=" << m.response_time_subframes;
            } else if constexpr (std::is_same_v<T, ProvideLocationInformation>) {
                os << " rstd_count=" << m.measurements.size();
                for (const auto& r : m.measurements) {
                    os << "\n  cell " << r.neighbor_cell_id << " vs " << r.reference_cell_id << " rstd_ns="
                       << std::setprecision(6) << r.rstd_s * 1e9 << " quality_db=" << std::setprecision(4) << r.quality_db;
                }
            }
        },
        msg);
    return os.str();
}

std::string hex_dump(std::span<const std::uint8_t> bytes) {
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (std::size_t i = 0; i < bytes.size(); i += 16) {
        os << std::setw(6) << i << ' ';
        for (std::size_t j = i; j < std::min(i + 16, bytes.size()); ++j) os << ' ' << std::setw(2) << int{bytes[j]};
        os << '\n';
    }
    return os.str();
}

// ---- session -------------------------------------------------------------

ProtocolError::ProtocolError(Phase phase, const std::string& expected, MessageType got)
    : Error("ProtocolError: in phase " + to_string(phase) + " expected " + expected + ", got " + to_string(got)),
      got_(got) {}

DeadlineExceeded::DeadlineExceeded(std::uint64_t deadline, std::uint64_t now)
    : Error("DeadlineExceeded: response due by subframe " + std::to_string(deadline) + ", arrived at " +
            std::to_string(now)) {}

StepResult ue_step(const SessionState& state, const LppMessage& incoming, const UeContext& ue) {
    StepResult out{state, std::nullopt};
    switch (state.phase) {
        case Phase::idle:
            if (const auto* m = std::get_if<RequestCapabilities>(&incoming)) {
                auto caps = ue.capabilities;
                caps.transaction_id = m->transaction_id;
                out.state.capabilities = caps;
                out.state.phase = Phase::capabilities_exchanged;
                out.outgoing = caps;
                return out;
            }
            throw ProtocolError(state.phase, "RequestCapabilities", type_of(incoming));
        case Phase::capabilities_exchanged:
            if (const auto* m = std::get_if<ProvideAssistanceData>(&incoming)) {
                out.state.assistance = *m;
                out.state.phase = Phase::assistance_delivered;
                return out;
            }
            throw ProtocolError(state.phase, "ProvideAssistanceData", type_of(incoming));
        case Phase::assistance_delivered:
            if (const auto* m = std::get_if<RequestLocationInformation>(&incoming)) {
                ProvideLocationInformation reply;
                reply.transaction_id = m->transaction_id;
                if (ue.measure) reply.measurements = ue.measure(*state.assistance);
                out.state.measurements = reply.measurements;
                out.state.phase = Phase::done;
                out.outgoing = reply;
                return out;
            }
            throw ProtocolError(state.phase, "RequestLocationInformation", type_of(incoming));
        case Phase::awaiting_location:
        case Phase::done:
            break;
    }
    throw ProtocolError(state.phase, "no further message", type_of(incoming));
}

namespace {

bool band_supported(const ProvideCapabilities& caps, std::uint16_t band) {
    return std::find(caps.supported_bands.begin(), caps.supported_bands.end(), band) != caps.supported_bands.end();
}

}  // namespace

StepResult server_begin(const SessionState& state, const ServerContext& server) {
    if (state.phase != Phase::idle) throw ProtocolError(state.phase, "nothing (session already started)",
                                                        MessageType::request_capabilities);
    return {state, RequestCapabilities{server.transaction_id}};
}

StepResult server_request_location(const SessionState& state, const ServerContext& server, std::uint64_t now_subframe) {
    if (state.phase != Phase::assistance_delivered) {
        throw ProtocolError(state.phase, "ProvideAssistanceData delivered first", MessageType::request_location_information);
    }
    StepResult out{state, RequestLocationInformation{server.transaction_id, server.response_time_subframes}};
    out.state.phase = Phase::awaiting_location;
    out.state.deadline_subframe = now_subframe + server.response_time_subframes;
    return out;
}

StepResult server_step(const SessionState& state, const LppMessage& incoming, const ServerContext& server,
                       std::uint64_t now_subframe) {
    StepResult out{state, std::nullopt};
    switch (state.phase) {
        case Phase::idle:
            if (const auto* m = std::get_if<ProvideCapabilities>(&incoming)) {
                if (!band_supported(*m, server.reference.band)) {
                    throw Error("capabilities exclude the reference cell band " + std::to_string(server.reference.band));
                }
                ProvideAssistanceData ad;
                ad.transaction_id = server.transaction_id;
                ad.reference = server.reference;
                for (const auto& n : server.neighbors) {
                    if (band_supported(*m, n.band)) ad.neighbors.push_back(n);
                }
                out.state.capabilities = *m;
                out.state.assistance = ad;
                out.state.phase = Phase::assistance_delivered;
                out.outgoing = std::move(ad);
                return out;
            }
            throw ProtocolError(state.phase, "ProvideCapabilities", type_of(incoming));
        case Phase::awaiting_location:
            if (const auto* m = std::get_if<ProvideLocationInformation>(&incoming)) {
                if (now_subframe > state.deadline_subframe) throw DeadlineExceeded(state.deadline_subframe, now_subframe);
                out.state.measurements = m->measurements;
                out.state.phase = Phase::done;
                return out;
            }
            throw ProtocolError(state.phase, "ProvideLocationInformation", type_of(incoming));
        case Phase::capabilities_exchanged:
        case Phase::assistance_delivered:
        case Phase::done:
            break;
    }
    throw ProtocolError(state.phase, "no incoming message", type_of(incoming));
}

Transcript run_session(const ServerContext& server, const UeContext& ue, std::uint64_t start_subframe,
                       std::uint64_t measurement_duration_subframes) {
    Transcript t;
    auto wire = [&](const LppMessage& m) {
        const auto bytes = encode(m);
        t.messages.push_back(decode(bytes));
        return t.messages.back();
    };

    auto s = server_begin(t.server, server);
    auto u = ue_step(t.ue, wire(*s.outgoing), ue);
    t.ue = u.state;
    s = server_step(s.state, wire(*u.outgoing), server, start_subframe);
    t.server = s.state;
    u = ue_step(t.ue, wire(*s.outgoing), ue);
    t.ue = u.state;
    s = server_request_location(t.server, server, start_subframe);
    t.server = s.state;
    u = ue_step(t.ue, wire(*s.outgoing), ue);
    t.ue = u.state;
    s = server_step(t.server, wire(*u.outgoing), server, start_subframe + measurement_duration_subframes);
    t.server = s.state;
    return t;
}

}  // namespace otdoa::lpp
