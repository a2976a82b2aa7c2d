#include "clamg/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace clamg::io {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

struct Banner {
    std::string format;   // coordinate | array
    std::string field;    // real | integer | pattern
    std::string symmetry; // general | symmetric | skew-symmetric
};

Banner read_banner(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty Matrix Market stream", 1);
    line_no = 1;
    std::istringstream ss(line);
    std::string tag, object;
    Banner b;
    ss >> tag >> object >> b.format >> b.field >> b.symmetry;
    if (tag != "%%MatrixMarket" || lower(object) != "matrix")
        throw ParseError("missing %%MatrixMarket matrix banner", line_no);
    b.format = lower(b.format);
    b.field = lower(b.field);
    b.symmetry = lower(b.symmetry);
    if (b.field == "complex")
        throw ParseError("complex Matrix Market files are not supported", line_no);
    if (b.field != "real" && b.field != "integer" && b.field != "pattern" && b.field != "double")
        throw ParseError("unknown field '" + b.field + "'", line_no);
    if (b.symmetry != "general" && b.symmetry != "symmetric" && b.symmetry != "skew-symmetric")
        throw ParseError("unsupported symmetry '" + b.symmetry + "'", line_no);
    return b;
}

// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        const auto p = line.find_first_not_of(" \t\r");
        if (p == std::string::npos || line[p] == '%')
            continue;
        return true;
    }
    return false;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f)
        throw Error("cannot open '" + path + "' for reading");
    return f;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f)
        throw Error("cannot open '" + path + "' for writing");
    return f;
}

template <class T>
void put_le(std::ostream& out, T v) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> bytes;
    in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
    if (!in)
        throw Error("truncated binary matrix stream");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

} // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::size_t line_no = 0;
    const Banner b = read_banner(in, line_no);
    if (b.format != "coordinate")
        throw ParseError("expected coordinate format, got '" + b.format + "'", line_no);
    std::string line;
    if (!next_data_line(in, line, line_no))
        throw ParseError("missing size line", line_no);
    long long nr = 0, nc = 0, nz = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> nr >> nc >> nz) || nr < 0 || nc < 0 || nz < 0)
            throw ParseError("malformed size line", line_no);
        if (nr > std::numeric_limits<index_t>::max() || nc > std::numeric_limits<index_t>::max())
            throw ParseError("matrix dimensions exceed 32-bit index range", line_no);
    }
    const bool pattern = b.field == "pattern";
    const bool sym = b.symmetry == "symmetric";
    const bool skew = b.symmetry == "skew-symmetric";
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nz) * (sym || skew ? 2 : 1));
    for (long long k = 0; k < nz; ++k) {
        if (!next_data_line(in, line, line_no))
            throw ParseError("expected " + std::to_string(nz) + " entries, found " + std::to_string(k), line_no);
        std::istringstream ss(line);
        long long i = 0, j = 0;
        double v = 1.0;
        if (!(ss >> i >> j) || (!pattern && !(ss >> v)))
            throw ParseError("malformed entry", line_no);
        if (i < 1 || i > nr || j < 1 || j > nc)
            throw ParseError("entry index out of range", line_no);
        const auto r = static_cast<index_t>(i - 1);
        const auto c = static_cast<index_t>(j - 1);
        t.push_back({r, c, v});
        if ((sym || skew) && r != c)
            t.push_back({c, r, skew ? -v : v});
    }
    return SparseMatrix::from_triplets(static_cast<index_t>(nr), static_cast<index_t>(nc), std::move(t), true);
}

SparseMatrix read_matrix_market(const std::string& path) {
    auto f = open_in(path);
    return read_matrix_market(f);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A, bool as_symmetric) {
    std::size_t count = 0;
    if (as_symmetric) {
        for (index_t i = 0; i < A.nrows(); ++i)
            for (const index_t c : A.row(i).cols)
                count += c <= i ? 1 : 0;
    } else {
        count = A.nnz();
    }
    out << "%%MatrixMarket matrix coordinate real " << (as_symmetric ? "symmetric" : "general") << "\n";
    out << A.nrows() << " " << A.ncols() << " " << count << "\n";
    out << std::setprecision(17);
    for (index_t i = 0; i < A.nrows(); ++i) {
        const auto r = A.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (as_symmetric && r.cols[k] > i)
                continue;
            out << i + 1 << " " << r.cols[k] + 1 << " " << r.vals[k] << "\n";
        }
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& A, bool as_symmetric) {
    auto f = open_out(path);
    write_matrix_market(f, A, as_symmetric);
}

MultiVector read_matrix_market_array(std::istream& in) {
    std::size_t line_no = 0;
    const Banner b = read_banner(in, line_no);
    if (b.format != "array")
        throw ParseError("expected array format, got '" + b.format + "'", line_no);
    std::string line;
    if (!next_data_line(in, line, line_no))
        throw ParseError("missing size line", line_no);
    long long nr = 0, nc = 0;
    std::istringstream size_ss(line);
    if (!(size_ss >> nr >> nc) || nr < 0 || nc < 0)
        throw ParseError("malformed size line", line_no);
    MultiVector V(static_cast<index_t>(nr), static_cast<index_t>(nc));
    for (long long j = 0; j < nc; ++j) {
        for (long long i = 0; i < nr; ++i) {
            if (!next_data_line(in, line, line_no))
                throw ParseError("array ends early", line_no);
            std::istringstream ss(line);
            double v;
            if (!(ss >> v))
                throw ParseError("malformed value", line_no);
            V(static_cast<index_t>(i), static_cast<index_t>(j)) = v;
        }
    }
    return V;
}

MultiVector read_matrix_market_array(const std::string& path) {
    auto f = open_in(path);
    return read_matrix_market_array(f);
}

void write_matrix_market_array(std::ostream& out, const MultiVector& V) {
    out << "%%MatrixMarket matrix array real general\n";
    out << V.nrows() << " " << V.ncols() << "\n" << std::setprecision(17);
    for (index_t j = 0; j < V.ncols(); ++j)
        for (index_t i = 0; i < V.nrows(); ++i)
            out << V(i, j) << "\n";
}

void write_matrix_market_array(const std::string& path, const MultiVector& V) {
    auto f = open_out(path);
    write_matrix_market_array(f, V);
}

void write_binary(std::ostream& out, const SparseMatrix& A) {
    out.write("AMGF", 4);
    put_le<std::uint32_t>(out, kBinaryVersion);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(A.nrows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(A.ncols()));
    put_le<std::uint64_t>(out, A.nnz());
    for (const index_t o : A.row_offsets())
        put_le<std::uint64_t>(out, static_cast<std::uint64_t>(o));
    for (const index_t c : A.col_indices())
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c));
    for (const double v : A.values())
        put_le<double>(out, v);
}

SparseMatrix read_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "AMGF", 4) != 0)
        throw Error("not an AMGF binary matrix");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kBinaryVersion)
        throw Error("unsupported AMGF version " + std::to_string(version));
    const auto nr = get_le<std::uint64_t>(in);
    const auto nc = get_le<std::uint64_t>(in);
    const auto nz = get_le<std::uint64_t>(in);
    constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<index_t>::max());
    if (nr > kMax || nc > kMax || nz > kMax)
        throw Error("AMGF dimensions exceed 32-bit index range");
    std::vector<index_t> off(nr + 1), col(nz);
    std::vector<double> val(nz);
    for (auto& o : off)
        o = static_cast<index_t>(get_le<std::uint64_t>(in));
    for (auto& c : col)
        c = static_cast<index_t>(get_le<std::uint32_t>(in));
    for (auto& v : val)
        v = get_le<double>(in);
    return SparseMatrix(static_cast<index_t>(nr), static_cast<index_t>(nc), std::move(off), std::move(col),
                        std::move(val));
}

} // namespace clamg::io
