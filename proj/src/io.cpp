#include "crq/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace crq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void io_fail(const std::string& msg) { throw Error(ErrorCode::Io, msg); }

struct MmHeader {
  bool coordinate = false;
  bool symmetric = false;
  Index rows = 0;
  Index cols = 0;
  Index entries = 0;
};

MmHeader read_mm_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) io_fail("empty Matrix Market stream");
  std::istringstream hs(lower(line));
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix") io_fail("missing Matrix Market banner");
  if (field != "real" && field != "integer" && field != "double") io_fail("unsupported field: " + field);
  MmHeader h;
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format != "array") {
    io_fail("unsupported format: " + format);
  }
  if (symmetry == "symmetric") {
    h.symmetric = true;
  } else if (symmetry != "general") {
    io_fail("unsupported symmetry: " + symmetry);
  }
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream ss(t);
    ss >> h.rows >> h.cols;
    if (h.coordinate) ss >> h.entries;
    if (!ss || h.rows <= 0 || h.cols <= 0) io_fail("bad Matrix Market size line");
    return h;
  }
  io_fail("missing Matrix Market size line");
}

double next_number(std::istream& is) {
  double v;
  if (!(is >> v)) io_fail("truncated Matrix Market data");
  return v;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) io_fail("line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
  return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail("cannot write " + path.string());
  out << text;
  if (!out) io_fail("write failed for " + path.string());
}

Eigen::SparseMatrix<double> read_matrix_market_sparse(std::istream& is) {
  const MmHeader h = read_mm_header(is);
  Eigen::SparseMatrix<double> a(h.rows, h.cols);
  if (!h.coordinate) {
    a = read_matrix_market_dense(is).sparseView();
    return a;
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(h.symmetric ? 2 * h.entries : h.entries));
  for (Index e = 0; e < h.entries; ++e) {
    const auto i = static_cast<Index>(next_number(is)) - 1;
    const auto j = static_cast<Index>(next_number(is)) - 1;
    const double v = next_number(is);
    if (i < 0 || j < 0 || i >= h.rows || j >= h.cols) io_fail("Matrix Market index out of range");
    t.emplace_back(i, j, v);
    if (h.symmetric && i != j) t.emplace_back(j, i, v);
  }
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

MatrixXd read_matrix_market_dense(std::istream& is) {
  const std::streampos start = is.tellg();
  const MmHeader h = read_mm_header(is);
  if (h.coordinate) {
    is.clear();
    is.seekg(start);
    return MatrixXd(read_matrix_market_sparse(is));
  }
  MatrixXd a(h.rows, h.cols);
  for (Index j = 0; j < h.cols; ++j) {
    for (Index i = h.symmetric ? j : 0; i < h.rows; ++i) {
      a(i, j) = next_number(is);
      if (h.symmetric) a(j, i) = a(i, j);
    }
  }
  return a;
}

void write_matrix_market_symmetric(std::ostream& os, const MatrixXd& a) {
  Index count = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j; i < a.rows(); ++i) count += a(i, j) != 0.0;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << a.rows() << ' ' << a.cols() << ' ' << count << '\n' << std::setprecision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j; i < a.rows(); ++i)
      if (a(i, j) != 0.0) os << i + 1 << ' ' << j + 1 << ' ' << a(i, j) << '\n';
}

void write_matrix_market_array(std::ostream& os, const MatrixXd& a) {
  os << "%%MatrixMarket matrix array real general\n";
  os << a.rows() << ' ' << a.cols() << '\n' << std::setprecision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) os << a(i, j) << '\n';
}

VectorXd read_vector(std::istream& is) {
  std::vector<double> vals;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) io_fail("bad number in vector: " + tok);
    } catch (const std::invalid_argument&) {
      io_fail("bad number in vector: " + tok);
    } catch (const std::out_of_range&) {
      io_fail("number out of range in vector: " + tok);
    }
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

void write_vector(std::ostream& os, const VectorXd& v) {
  os << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i) os << v(i) << '\n';
}

CrqProblem load_problem(const std::filesystem::path& manifest, std::uint64_t seed) {
  const KeyValues kv = parse_key_values(read_text_file(manifest));
  const std::filesystem::path dir = manifest.parent_path();
  auto path_of = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) io_fail("manifest lacks key " + key);
    const std::filesystem::path p(it->second);
    return p.is_absolute() ? p : dir / p;
  };
  std::ifstream fa(path_of("A")), fc(path_of("C")), fb(path_of("b"));
  if (!fa || !fc || !fb) io_fail("cannot open a file named in the manifest");
  Eigen::SparseMatrix<double> a = read_matrix_market_sparse(fa);
  MatrixXd c = read_matrix_market_dense(fc);
  VectorXd b = read_vector(fb);
  if (a.rows() != a.cols()) io_fail("A is not square");
  return make_problem(LinearOperator::from_sparse(std::move(a)), std::move(c), std::move(b), seed);
}

void save_problem(const std::filesystem::path& dir, const MatrixXd& a, const MatrixXd& c, const VectorXd& b) {
  std::filesystem::create_directories(dir);
  std::ostringstream sa, sc, sb;
  write_matrix_market_symmetric(sa, a);
  write_matrix_market_array(sc, c);
  write_vector(sb, b);
  write_text_file(dir / "A.mtx", sa.str());
  write_text_file(dir / "C.mtx", sc.str());
  write_text_file(dir / "b.txt", sb.str());
  write_text_file(dir / "manifest.txt", "A=A.mtx\nC=C.mtx\nb=b.txt\n");
}

namespace {

long read_pgm_int(std::istream& is) {
  int ch;
  while ((ch = is.peek()) != EOF) {
    if (std::isspace(ch)) {
      is.get();
    } else if (ch == '#') {
      std::string skip;
      std::getline(is, skip);
    } else {
      break;
    }
  }
  long v;
  if (!(is >> v)) io_fail("malformed PGM header or data");
  return v;
}

}  // namespace

GrayImage read_pgm(std::istream& is) {
  char magic[2];
  if (!is.read(magic, 2) || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) io_fail("not a P2/P5 PGM");
  GrayImage img;
  img.width = read_pgm_int(is);
  img.height = read_pgm_int(is);
  const long maxval = read_pgm_int(is);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 65535) io_fail("bad PGM header");
  img.pixels.resize(static_cast<std::size_t>(img.size()));
  if (magic[1] == '2') {
    for (double& p : img.pixels) p = static_cast<double>(read_pgm_int(is));
    return img;
  }
  is.get();
  const bool wide = maxval > 255;
  std::vector<unsigned char> raw(img.pixels.size() * (wide ? 2 : 1));
  if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    io_fail("truncated PGM raster");
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = wide ? raw[2 * i] * 256.0 + raw[2 * i + 1] : raw[i];
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm16(std::ostream& os, Index width, Index height, const std::vector<double>& values) {
  if (static_cast<Index>(values.size()) != width * height) io_fail("raster size mismatch");
  os << "P5\n" << width << ' ' << height << "\n65535\n";
  std::vector<unsigned char> raw(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto q = static_cast<unsigned>(std::lround(std::clamp(values[i], 0.0, 1.0) * 65535.0));
    raw[2 * i] = static_cast<unsigned char>(q >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
  }
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm_mask(std::ostream& os, Index width, Index height, const std::vector<std::uint8_t>& mask) {
  if (static_cast<Index>(mask.size()) != width * height) io_fail("raster size mismatch");
  os << "P5\n" << width << ' ' << height << "\n255\n";
  std::vector<unsigned char> raw(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) raw[i] = mask[i] ? 255 : 0;
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

LabelSet read_labels(std::istream& is, Index width, Index height) {
  LabelSet labels;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    Index row, col;
    std::string sign;
    if (!(ss >> row >> col >> sign) || (sign != "+" && sign != "-"))
      io_fail("labels line " + std::to_string(lineno) + ": expected 'row col +|-'");
    if (row < 0 || row >= height || col < 0 || col >= width)
      io_fail("labels line " + std::to_string(lineno) + ": pixel outside the image");
    (sign == "+" ? labels.I : labels.J).push_back(row * width + col);
  }
  return labels;
}

}  // namespace crq
