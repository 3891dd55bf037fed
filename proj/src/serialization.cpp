#include "spd/serialization.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace spd::io {

static_assert(std::endian::native == std::endian::little,
              "binary containers are little-endian; add byte swapping for this host");

namespace {

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("unexpected end of stream");
  return v;
}

void write_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

void expect_magic(std::istream& is, const char (&magic)[5]) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0) {
    throw IoError(std::string("bad magic, expected ") + magic);
  }
}

// row-major on disk
void write_entries(std::ostream& os, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) write_pod<double>(os, m(i, j));
}

Matrix read_entries(std::istream& is, Index dim) {
  Matrix m(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) m(i, j) = read_pod<double>(is);
  return m;
}

std::vector<double> flatten_row_major(const Matrix& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix unflatten_row_major(const std::vector<double>& flat, Index dim) {
  if (static_cast<Index>(flat.size()) != dim * dim) {
    throw IoError("entries length does not match dim*dim");
  }
  Matrix m(dim, dim);
  std::size_t k = 0;
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) m(i, j) = flat[k++];
  return m;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream os(path, mode);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream is(path, mode);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

}  // namespace

json spd_to_json(const SpdMatrix& m) {
  return json{{"dim", m.dim()}, {"entries", flatten_row_major(m.mat())}};
}

SpdMatrix spd_from_json(const json& j, PdPolicy policy) {
  const Index dim = j.at("dim").get<Index>();
  const auto flat = j.at("entries").get<std::vector<double>>();
  return SpdMatrix::from_matrix(unflatten_row_major(flat, dim), policy);
}

json dictionary_to_json(const Dictionary& d) {
  json atoms = json::array();
  for (Index i = 0; i < d.n_atoms(); ++i) {
    atoms.push_back(flatten_row_major(d.atom(i).mat()));
  }
  return json{{"dim", d.dim()}, {"n_atoms", d.n_atoms()}, {"atoms", std::move(atoms)}};
}

Dictionary dictionary_from_json(const json& j, PdPolicy policy) {
  const Index dim = j.at("dim").get<Index>();
  const auto n = j.at("n_atoms").get<Index>();
  const auto& atoms_json = j.at("atoms");
  if (static_cast<Index>(atoms_json.size()) != n) {
    throw IoError("dictionary JSON: n_atoms does not match atom list");
  }
  std::vector<SpdMatrix> atoms;
  atoms.reserve(atoms_json.size());
  for (const auto& a : atoms_json) {
    atoms.push_back(
        SpdMatrix::from_matrix(unflatten_row_major(a.get<std::vector<double>>(), dim), policy));
  }
  return Dictionary(std::move(atoms));
}

void write_spd(std::ostream& os, const SpdMatrix& m) {
  write_magic(os, "SPD1");
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.dim()));
  write_entries(os, m.mat());
  if (!os) throw IoError("write failed");
}

SpdMatrix read_spd(std::istream& is, PdPolicy policy) {
  expect_magic(is, "SPD1");
  const auto dim = static_cast<Index>(read_pod<std::uint32_t>(is));
  return SpdMatrix::from_matrix(read_entries(is, dim), policy);
}

void write_spd_file(const std::string& path, const SpdMatrix& m) {
  auto os = open_out(path, std::ios::binary);
  write_spd(os, m);
}

SpdMatrix read_spd_file(const std::string& path, PdPolicy policy) {
  auto is = open_in(path, std::ios::binary);
  return read_spd(is, policy);
}

void write_dictionary(std::ostream& os, const Dictionary& d) {
  write_magic(os, "SPDD");
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.dim()));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d.n_atoms()));
  for (Index i = 0; i < d.n_atoms(); ++i) write_entries(os, d.atom(i).mat());
  if (!os) throw IoError("write failed");
}

Dictionary read_dictionary(std::istream& is, PdPolicy policy) {
  expect_magic(is, "SPDD");
  const auto dim = static_cast<Index>(read_pod<std::uint32_t>(is));
  const auto n = static_cast<Index>(read_pod<std::uint32_t>(is));
  std::vector<SpdMatrix> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    atoms.push_back(SpdMatrix::from_matrix(read_entries(is, dim), policy));
  }
  return Dictionary(std::move(atoms));
}

void write_dictionary_file(const std::string& path, const Dictionary& d) {
  auto os = open_out(path, std::ios::binary);
  write_dictionary(os, d);
}

Dictionary read_dictionary_file(const std::string& path, PdPolicy policy) {
  auto is = open_in(path, std::ios::binary);
  return read_dictionary(is, policy);
}

void write_dataset(std::ostream& os, const DatasetPayload& ds) {
  if (ds.items.size() != ds.labels.size()) {
    throw DimensionMismatch("write_dataset: items/labels length mismatch");
  }
  write_magic(os, "SPDS");
  const Index dim = ds.items.empty() ? 0 : ds.items.front().dim();
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(dim));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(ds.items.size()));
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    write_entries(os, ds.items[i].mat());
    write_pod<std::int32_t>(os, ds.labels[i]);
  }
  if (!os) throw IoError("write failed");
}

DatasetPayload read_dataset(std::istream& is, PdPolicy policy) {
  expect_magic(is, "SPDS");
  const auto dim = static_cast<Index>(read_pod<std::uint32_t>(is));
  const auto count = read_pod<std::uint32_t>(is);
  DatasetPayload ds;
  ds.items.reserve(count);
  ds.labels.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ds.items.push_back(SpdMatrix::from_matrix(read_entries(is, dim), policy));
    ds.labels.push_back(read_pod<std::int32_t>(is));
  }
  return ds;
}

void write_dataset_file(const std::string& path, const DatasetPayload& ds) {
  auto os = open_out(path, std::ios::binary);
  write_dataset(os, ds);
}

DatasetPayload read_dataset_file(const std::string& path, PdPolicy policy) {
  auto is = open_in(path, std::ios::binary);
  return read_dataset(is, policy);
}

json dataset_to_json(const DatasetPayload& ds) {
  if (ds.items.size() != ds.labels.size()) {
    throw DimensionMismatch("dataset_to_json: items/labels length mismatch");
  }
  json items = json::array();
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    items.push_back(json{{"label", ds.labels[i]},
                         {"entries", flatten_row_major(ds.items[i].mat())}});
  }
  const Index dim = ds.items.empty() ? 0 : ds.items.front().dim();
  return json{{"dim", dim}, {"count", ds.items.size()}, {"items", std::move(items)}};
}

DatasetPayload dataset_from_json(const json& j, PdPolicy policy) {
  const Index dim = j.at("dim").get<Index>();
  DatasetPayload ds;
  for (const auto& item : j.at("items")) {
    ds.labels.push_back(item.at("label").get<int>());
    ds.items.push_back(SpdMatrix::from_matrix(
        unflatten_row_major(item.at("entries").get<std::vector<double>>(), dim), policy));
  }
  return ds;
}

void write_codes_file(const std::string& path, const std::vector<CodeRecord>& codes) {
  auto os = open_out(path, std::ios::out);
  for (const auto& c : codes) {
    json line{{"index", c.index},
              {"label", c.label},
              {"coeffs", std::vector<double>(c.coeffs.data(), c.coeffs.data() + c.coeffs.size())},
              {"objective", c.objective},
              {"iterations", c.iterations},
              {"wall_ms", c.wall_ms}};
    os << line.dump() << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<CodeRecord> read_codes_file(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  std::vector<CodeRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    CodeRecord c;
    c.index = j.at("index").get<long>();
    c.label = j.at("label").get<int>();
    const auto coeffs = j.at("coeffs").get<std::vector<double>>();
    c.coeffs = Eigen::Map<const Vector>(coeffs.data(), static_cast<Index>(coeffs.size()));
    c.objective = j.at("objective").get<double>();
    c.iterations = j.at("iterations").get<int>();
    c.wall_ms = j.at("wall_ms").get<double>();
    out.push_back(std::move(c));
  }
  return out;
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
  auto os = open_out(path, std::ios::out);
  for (std::size_t i = 0; i < header.size(); ++i) {
    os << header[i] << (i + 1 < header.size() ? "," : "");
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i] << (i + 1 < row.size() ? "," : "");
    }
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json load_json_file(const std::string& path) {
  auto is = open_in(path, std::ios::in);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  auto os = open_out(path, std::ios::out);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace spd::io
