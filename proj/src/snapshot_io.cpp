#include "qkin/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace qkin {

namespace {

constexpr char kGridMagic[17] = "QKIN-DENSITY-MX\0";
constexpr char kBathMagic[17] = "QKIN-BATH-SAMPLE";

std::uint64_t bswap64(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
}

void store_u64(std::ostream& os, std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) v = bswap64(v);
    os.write(reinterpret_cast<const char*>(&v), 8);
}

void store_f64(std::ostream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    store_u64(os, v);
}

std::uint64_t load_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 8);
    if constexpr (std::endian::native == std::endian::big) v = bswap64(v);
    return v;
}

double load_f64(std::istream& is) {
    const std::uint64_t v = load_u64(is);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}

void store_complex_array(std::ostream& os, const cdouble* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        store_f64(os, data[i].real());
        store_f64(os, data[i].imag());
    }
}

void load_complex_array(std::istream& is, cdouble* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = load_f64(is);
        const double im = load_f64(is);
        data[i] = cdouble(re, im);
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    return is;
}

void check_magic(std::istream& is, const char* magic, const char* what) {
    char buf[16];
    is.read(buf, 16);
    if (std::memcmp(buf, magic, 16) != 0)
        throw std::runtime_error(std::string("bad magic for ") + what);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const DensityMatrixGrid& grid,
                    const SnapshotMeta& meta) {
    auto os = open_out(path);
    os.write(kGridMagic, 16);
    store_u64(os, meta.version);
    store_u64(os, meta.config_hash);
    store_u64(os, meta.seed);
    store_u64(os, static_cast<std::uint64_t>(grid.nr()));
    store_u64(os, static_cast<std::uint64_t>(grid.ns()));
    store_f64(os, grid.r_extent());
    store_f64(os, grid.s_extent());
    store_f64(os, grid.time_stamp);
    store_complex_array(os, grid.data(), grid.size());
}

DensityMatrixGrid read_snapshot(const std::filesystem::path& path, SnapshotMeta* meta) {
    auto is = open_in(path);
    check_magic(is, kGridMagic, "density snapshot");
    SnapshotMeta m;
    m.version = load_u64(is);
    if (m.version != 1) throw std::runtime_error("unsupported snapshot version");
    m.config_hash = load_u64(is);
    m.seed = load_u64(is);
    const auto nr = static_cast<int>(load_u64(is));
    const auto ns = static_cast<int>(load_u64(is));
    const double r_extent = load_f64(is);
    const double s_extent = load_f64(is);
    const double time_stamp = load_f64(is);
    DensityMatrixGrid grid(nr, ns, r_extent, s_extent);
    grid.time_stamp = time_stamp;
    load_complex_array(is, grid.data(), grid.size());
    if (!is) throw std::runtime_error("truncated snapshot: " + path.string());
    if (meta) *meta = m;
    return grid;
}

void write_bath_sample(const std::filesystem::path& path, const BathSample& sample,
                       SymmetryClass symmetry, const SnapshotMeta& meta) {
    auto os = open_out(path);
    os.write(kBathMagic, 16);
    store_u64(os, meta.version);
    store_u64(os, meta.config_hash);
    store_u64(os, meta.seed);
    store_u64(os, static_cast<std::uint64_t>(sample.eps.size()));
    store_u64(os, static_cast<std::uint64_t>(sample.h.size()));
    store_u64(os, static_cast<std::uint64_t>(symmetry));
    for (double e : sample.eps) store_f64(os, e);
    // Row-major on disk regardless of Eigen's internal layout.
    for (const auto& h : sample.h)
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            for (Eigen::Index j = 0; j < h.cols(); ++j) {
                store_f64(os, h(i, j).real());
                store_f64(os, h(i, j).imag());
            }
}

BathSample read_bath_sample(const std::filesystem::path& path, SymmetryClass* symmetry,
                            SnapshotMeta* meta) {
    auto is = open_in(path);
    check_magic(is, kBathMagic, "bath sample");
    SnapshotMeta m;
    m.version = load_u64(is);
    if (m.version != 1) throw std::runtime_error("unsupported bath sample version");
    m.config_hash = load_u64(is);
    m.seed = load_u64(is);
    const auto dim = static_cast<int>(load_u64(is));
    const auto npoints = static_cast<int>(load_u64(is));
    const auto sym = static_cast<SymmetryClass>(load_u64(is));
    BathSample sample;
    sample.eps.resize(dim);
    for (auto& e : sample.eps) e = load_f64(is);
    sample.h.assign(npoints, Eigen::MatrixXcd(dim, dim));
    for (auto& h : sample.h)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const double re = load_f64(is);
                const double im = load_f64(is);
                h(i, j) = cdouble(re, im);
            }
    if (!is) throw std::runtime_error("truncated bath sample: " + path.string());
    if (symmetry) *symmetry = sym;
    if (meta) *meta = m;
    return sample;
}

struct TableWriter::Impl {
    std::ofstream os;
};

TableWriter::TableWriter(const std::filesystem::path& path, const SnapshotMeta& meta,
                         const std::vector<std::string>& columns)
    : impl_(new Impl) {
    impl_->os.open(path);
    if (!impl_->os) {
        delete impl_;
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    impl_->os << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0')
              << meta.config_hash << std::dec << " seed=" << meta.seed << "\n";
    impl_->os << "#";
    for (const auto& c : columns) impl_->os << " " << c;
    impl_->os << "\n";
    impl_->os << std::setprecision(17);
}

TableWriter::~TableWriter() { delete impl_; }

void TableWriter::row(const std::vector<double>& values) {
    auto& os = impl_->os;
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
    os << "\n";
}

}  // namespace qkin
