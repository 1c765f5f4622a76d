#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "apollo/packing.hpp"

namespace apollo {

namespace {

constexpr char kMagic[4] = {'A', 'P', 'K', 'G'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    template <class T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    const std::vector<char>& data() const { return buf_; }

private:
    std::vector<char> buf_;
};

class Reader {
public:
    explicit Reader(std::vector<char> data) : buf_(std::move(data)) {}

    template <class T>
    T get() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    void bytes(void* out, std::size_t n) {
        if (buf_.size() - pos_ < n) throw FormatError(FormatErrorKind::truncated, "cache file is truncated");
        std::memcpy(out, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

static_assert(std::endian::native == std::endian::little, "cache format is little-endian");

}  // namespace

void save(const PackingStore& store, const std::string& path) {
    Writer w;
    w.bytes(kMagic, 4);
    w.put(kVersion);
    Fingerprint fp = store.fingerprint();
    w.bytes(fp.data(), fp.size());
    w.put<std::uint8_t>(store.exact() ? 1 : 0);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(store.dim()));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(store.cutoff.kind));
    w.put(store.cutoff.value);
    w.put<std::uint64_t>(store.size());
    w.put(store.stats.nodes_expanded);
    w.put(store.stats.dedup_hits);
    w.put(store.stats.peak_frontier);
    w.put(store.stats.pruned);
    std::string text = store.spec.canonical_text();
    w.put<std::uint32_t>(static_cast<std::uint32_t>(text.size()));
    w.bytes(text.data(), text.size());
    const int n = store.dim() + 2;
    for (std::size_t k = 0; k < store.size(); ++k) {
        if (store.exact()) {
            const auto& r = store.exact_records[k];
            w.put(r.b);
            w.put(r.bhat);
            for (int a = 0; a < n - 2; ++a) w.put(r.c[a]);
        } else {
            const auto& r = store.records[k];
            w.put(r.b);
            w.put(r.bhat);
            for (int a = 0; a < n - 2; ++a) w.put(r.c[a]);
        }
    }

    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename cache into place: " + ec.message());
}

PackingStore load(const std::string& path, ExpectedMode mode, const std::optional<Fingerprint>& expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(std::move(data));

    char magic[4];
    if (r.remaining() < 4) throw FormatError(FormatErrorKind::bad_magic, "not a packing cache");
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError(FormatErrorKind::bad_magic, "not a packing cache");
    auto version = r.get<std::uint32_t>();
    if (version != kVersion) {
        throw FormatError(FormatErrorKind::version_mismatch,
                          "cache version " + std::to_string(version) + ", expected " + std::to_string(kVersion));
    }
    Fingerprint fp;
    r.bytes(fp.data(), fp.size());
    if (expected && *expected != fp) throw FormatError(FormatErrorKind::fingerprint_mismatch, "cache was built for a different packing");
    bool exact = r.get<std::uint8_t>() != 0;
    if ((mode == ExpectedMode::exact && !exact) || (mode == ExpectedMode::floating && exact)) {
        throw FormatError(FormatErrorKind::mode_mismatch, exact ? "cache holds exact records" : "cache holds float records");
    }
    int dim = r.get<std::uint8_t>();
    auto kind = r.get<std::uint8_t>();
    if (kind > 2) throw FormatError(FormatErrorKind::version_mismatch, "unknown cutoff kind");
    PackingStore store;
    store.cutoff.kind = static_cast<GenerationCutoff::Kind>(kind);
    store.cutoff.value = r.get<double>();
    auto count = r.get<std::uint64_t>();
    store.stats.nodes_expanded = r.get<std::uint64_t>();
    store.stats.dedup_hits = r.get<std::uint64_t>();
    store.stats.peak_frontier = r.get<std::uint64_t>();
    store.stats.pruned = r.get<std::uint64_t>();
    auto len = r.get<std::uint32_t>();
    std::string text(len, '\0');
    r.bytes(text.data(), len);
    try {
        store.spec = PackingSpec::from_text(text);
    } catch (const ConfigError& e) {
        throw FormatError(FormatErrorKind::version_mismatch, std::string("unreadable spec header: ") + e.what());
    }
    if (store.spec.fingerprint() != fp) throw FormatError(FormatErrorKind::fingerprint_mismatch, "spec header does not match its fingerprint");
    if (store.spec.exact() != exact || store.spec.dim != dim) throw FormatError(FormatErrorKind::mode_mismatch, "header fields disagree");

    const std::size_t width = (exact ? sizeof(Int128) : sizeof(double)) * static_cast<std::size_t>(dim + 2);
    if (count > r.remaining() / width) throw FormatError(FormatErrorKind::truncated, "cache file is truncated");
    store.records.reserve(count);
    if (exact) store.exact_records.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        if (exact) {
            ExactSphere v{};
            v.b = r.get<Int128>();
            v.bhat = r.get<Int128>();
            for (int a = 0; a < dim; ++a) v.c[a] = r.get<Int128>();
            store.exact_records.push_back(v);
            store.records.push_back(to_float(v));
        } else {
            OrientedSphere v{};
            v.b = r.get<double>();
            v.bhat = r.get<double>();
            for (int a = 0; a < dim; ++a) v.c[a] = r.get<double>();
            store.records.push_back(v);
        }
    }
    if (r.remaining() != 0) throw FormatError(FormatErrorKind::truncated, "trailing bytes after records");
    return store;
}

}  // namespace apollo
