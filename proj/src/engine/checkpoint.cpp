#include "fiinet/engine/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fiinet/error.hpp"

namespace fiinet::engine {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) fail(ErrorCategory::Io, "truncated checkpoint");
    return v;
}

std::string get_bytes(std::istream& is, std::size_t n) {
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    if (!is) fail(ErrorCategory::Io, "truncated checkpoint");
    return s;
}

std::string encode_metadata(const Metadata& md) {
    std::string out;
    for (const auto& [k, v] : md) {
        require(k.find_first_of("=\n") == std::string::npos && v.find('\n') == std::string::npos,
                ErrorCategory::Config, "checkpoint metadata may not contain '=' in keys or newlines");
        out += k + "=" + v + "\n";
    }
    return out;
}

Metadata decode_metadata(const std::string& text) {
    Metadata md;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCategory::Io, "malformed checkpoint metadata line");
        md[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return md;
}

template <typename Stored, typename Real>
Tensor<Real> read_values(std::istream& is, Shape shape) {
    std::vector<Stored> raw(shape_size(shape));
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(Stored)));
    if (!is) fail(ErrorCategory::Io, "truncated checkpoint");
    std::vector<Real> data(raw.begin(), raw.end());
    return Tensor<Real>(std::move(shape), std::move(data));
}

}  // namespace

template <typename Real>
void write_checkpoint(std::ostream& os, const ParameterStore<Real>& params, const Metadata& metadata) {
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    put<std::uint32_t>(os, kCheckpointVersion);
    put<std::uint32_t>(os, sizeof(Real));
    const std::string md = encode_metadata(metadata);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(md.size()));
    os.write(md.data(), static_cast<std::streamsize>(md.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& e : params.entries()) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(e.name.size()));
        os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(e.value.rank()));
        for (auto d : e.value.shape()) put<std::uint64_t>(os, d);
        put<std::uint8_t>(os, e.decay ? 1 : 0);
        os.write(reinterpret_cast<const char*>(e.value.ptr()), static_cast<std::streamsize>(e.value.size() * sizeof(Real)));
    }
    if (!os) fail(ErrorCategory::Io, "failed writing checkpoint");
}

template <typename Real>
void save_checkpoint(const std::filesystem::path& path, const ParameterStore<Real>& params,
                     const Metadata& metadata) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
    write_checkpoint(os, params, metadata);
}

template <typename Real>
Checkpoint<Real> read_checkpoint(std::istream& is) {
    char magic[sizeof(kCheckpointMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        fail(ErrorCategory::Io, "not a checkpoint file (bad magic)");
    const auto version = get<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        fail(ErrorCategory::Io, "unsupported checkpoint version " + std::to_string(version));
    const auto width = get<std::uint32_t>(is);
    if (width != 4 && width != 8) fail(ErrorCategory::Io, "unsupported scalar width " + std::to_string(width));

    Checkpoint<Real> ck;
    ck.metadata = decode_metadata(get_bytes(is, get<std::uint32_t>(is)));
    const auto count = get<std::uint32_t>(is);
    for (std::uint32_t r = 0; r < count; ++r) {
        std::string name = get_bytes(is, get<std::uint32_t>(is));
        const auto rank = get<std::uint32_t>(is);
        if (rank == 0 || rank > 8) fail(ErrorCategory::Io, "bad rank for checkpoint record '" + name + "'");
        Shape shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(get<std::uint64_t>(is));
        const bool decay = get<std::uint8_t>(is) != 0;
        Tensor<Real> value = width == 4 ? read_values<float, Real>(is, std::move(shape))
                                        : read_values<double, Real>(is, std::move(shape));
        ck.params.add(std::move(name), std::move(value), decay);
    }
    return ck;
}

template <typename Real>
Checkpoint<Real> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCategory::Io, "cannot open checkpoint '" + path.string() + "'");
    return read_checkpoint<Real>(is);
}

#define FIINET_INSTANTIATE(R)                                                                         \
    template void write_checkpoint<R>(std::ostream&, const ParameterStore<R>&, const Metadata&);       \
    template void save_checkpoint<R>(const std::filesystem::path&, const ParameterStore<R>&,           \
                                     const Metadata&);                                                 \
    template Checkpoint<R> read_checkpoint<R>(std::istream&);                                          \
    template Checkpoint<R> load_checkpoint<R>(const std::filesystem::path&);
FIINET_INSTANTIATE(float)
FIINET_INSTANTIATE(double)
#undef FIINET_INSTANTIATE

}  // namespace fiinet::engine
