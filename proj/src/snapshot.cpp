// Store snapshot format "DKB1": little-endian, length-prefixed records, the
// canonical schema source embedded with its hash, trailing FNV-1a checksum.

#include <bit>
#include <cstring>

#include "dcmd/errors.hpp"
#include "dcmd/graphstore.hpp"

namespace dcmd {

namespace {

constexpr char kMagic[4] = {'D', 'K', 'B', '1'};
constexpr uint32_t kVersion = 1;

class Writer {
public:
    std::vector<uint8_t> out;

    void u8(uint8_t v) { out.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
};

class Reader {
public:
    explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

    size_t offset() const { return pos_; }
    size_t remaining() const { return bytes_.size() - pos_; }

    void need(size_t n, const char* what) {
        if (remaining() < n) throw DecodeError(std::string("truncated snapshot reading ") + what, pos_);
    }
    uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[pos_++];
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    uint64_t u64(const char* what) {
        need(8, what);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    int64_t i64(const char* what) { return static_cast<int64_t>(u64(what)); }
    double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
    std::string str(const char* what) {
        uint32_t n = u32(what);
        need(n, what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

void write_value(Writer& w, const AttrValue& v) {
    w.u8(static_cast<uint8_t>(v.kind()));
    switch (v.kind()) {
        case ValueKind::string_v: w.str(v.as_string()); break;
        case ValueKind::double_v: w.f64(v.as_double()); break;
        case ValueKind::datetime_v: w.i64(v.as_datetime().centiseconds); break;
        case ValueKind::boolean_v: w.u8(v.as_bool() ? 1 : 0); break;
    }
}

AttrValue read_value(Reader& r) {
    uint8_t kind = r.u8("value kind");
    switch (kind) {
        case 0: return AttrValue::of_string(r.str("string value"));
        case 1: return AttrValue::of_double(r.f64("double value"));
        case 2: return AttrValue::of_datetime(DateTime::from_centiseconds(r.i64("datetime value")));
        case 3: return AttrValue::of_bool(r.u8("boolean value") != 0);
        default: throw DecodeError("unknown value kind " + std::to_string(kind), r.offset() - 1);
    }
}

}  // namespace

std::vector<uint8_t> Store::snapshot() const {
    Writer w;
    w.out.insert(w.out.end(), kMagic, kMagic + 4);
    w.u32(kVersion);
    std::string schema_src = print_schema(*schema_);
    w.u64(fnv1a64(schema_src));
    w.str(schema_src);
    w.u64(next_id_);
    w.u64(things_.size());
    for (const auto& [id, t] : things_) {
        Writer rec;
        rec.u64(id);
        rec.str(t.type_name);
        rec.u32(static_cast<uint32_t>(t.attributes.size()));
        for (const auto& [name, value] : t.attributes) {
            rec.str(name);
            write_value(rec, value);
        }
        rec.u32(static_cast<uint32_t>(t.role_players.size()));
        for (const auto& [role, players] : t.role_players) {
            rec.str(role);
            rec.u32(static_cast<uint32_t>(players.size()));
            for (ThingId pid : players) rec.u64(pid);
        }
        w.u32(static_cast<uint32_t>(rec.out.size()));
        w.out.insert(w.out.end(), rec.out.begin(), rec.out.end());
    }
    uint64_t check = fnv1a64(std::string_view(reinterpret_cast<const char*>(w.out.data()),
                                              w.out.size()));
    w.u64(check);
    return std::move(w.out);
}

Store restore_store(std::span<const uint8_t> bytes) {
    Reader r(bytes);
    r.need(4, "magic");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DecodeError("bad snapshot magic", 0);
    if (bytes.size() < 12) throw DecodeError("truncated snapshot header", bytes.size());
    // Verify trailing checksum before trusting the body.
    {
        size_t body = bytes.size() - 8;
        uint64_t stored = 0;
        for (int i = 0; i < 8; ++i) stored |= static_cast<uint64_t>(bytes[body + i]) << (8 * i);
        uint64_t computed = fnv1a64(
            std::string_view(reinterpret_cast<const char*>(bytes.data()), body));
        if (stored != computed) throw DecodeError("snapshot checksum mismatch", body);
    }
    for (int i = 0; i < 4; ++i) r.u8("magic");
    uint32_t version = r.u32("version");
    if (version != kVersion)
        throw DecodeError("unsupported snapshot version " + std::to_string(version), 4);
    uint64_t schema_hash = r.u64("schema hash");
    std::string schema_src = r.str("schema source");
    if (fnv1a64(schema_src) != schema_hash)
        throw DecodeError("embedded schema does not match its hash", r.offset());

    SchemaDef schema;
    try {
        schema = parse_schema(schema_src);
    } catch (const ParseError& e) {
        throw DecodeError(std::string("embedded schema invalid: ") + e.what(), r.offset());
    }
    Store store(std::make_shared<SchemaDef>(std::move(schema)));

    uint64_t next_id = r.u64("next id");
    uint64_t count = r.u64("thing count");
    for (uint64_t i = 0; i < count; ++i) {
        uint32_t rec_len = r.u32("record length");
        size_t rec_start = r.offset();
        ThingInstance t;
        t.id = r.u64("thing id");
        t.type_name = r.str("type name");
        uint32_t nattrs = r.u32("attribute count");
        for (uint32_t a = 0; a < nattrs; ++a) {
            std::string name = r.str("attribute name");
            t.attributes.emplace(std::move(name), read_value(r));
        }
        uint32_t nroles = r.u32("role count");
        for (uint32_t ri = 0; ri < nroles; ++ri) {
            std::string role = r.str("role name");
            uint32_t nplayers = r.u32("player count");
            std::vector<ThingId> players;
            players.reserve(nplayers);
            for (uint32_t p = 0; p < nplayers; ++p) players.push_back(r.u64("player id"));
            t.role_players.emplace(std::move(role), std::move(players));
        }
        if (r.offset() - rec_start != rec_len)
            throw DecodeError("record length mismatch", rec_start);
        if (store.things_.count(t.id)) throw DecodeError("duplicate thing id", rec_start);
        store.index_thing(t);
        store.things_.emplace(t.id, std::move(t));
    }
    if (r.remaining() != 8) throw DecodeError("trailing bytes after checksum", r.offset());
    store.next_id_ = next_id;

    // Referential integrity of restored role players.
    for (const auto& [id, t] : store.things_)
        for (const auto& [role, players] : t.role_players)
            for (ThingId pid : players)
                if (!store.find(pid))
                    throw DecodeError("role player id " + std::to_string(pid) + " missing", 0);
    return store;
}

Store restore_store(std::span<const uint8_t> bytes, const SchemaDef& expected) {
    Store s = restore_store(bytes);
    if (s.schema().hash() != expected.hash())
        throw DecodeError("snapshot schema hash does not match the expected schema", 8);
    return s;
}

}  // namespace dcmd
