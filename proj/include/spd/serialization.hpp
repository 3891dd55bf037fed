#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spd/manifold.hpp"
#include "spd/types.hpp"

// File formats:
//   single matrix  "SPD1": magic, u32 dim, dim*dim f64 (row-major), all LE
//   dictionary     "SPDD": magic, u32 dim, u32 n_atoms, atoms in order
//   dataset        "SPDS": magic, u32 dim, u32 count, then per item the
//                  matrix followed by its i32 label
// JSON mirrors the same payloads ({dim, entries}, {dim, n_atoms, atoms},
// {dim, count, items}); exact symmetry is re-enforced on load.

namespace spd::io {

using json = nlohmann::json;

json spd_to_json(const SpdMatrix& m);
SpdMatrix spd_from_json(const json& j, PdPolicy policy = PdPolicy::strict);

json dictionary_to_json(const Dictionary& d);
Dictionary dictionary_from_json(const json& j, PdPolicy policy = PdPolicy::strict);

void write_spd(std::ostream& os, const SpdMatrix& m);
SpdMatrix read_spd(std::istream& is, PdPolicy policy = PdPolicy::strict);
void write_spd_file(const std::string& path, const SpdMatrix& m);
SpdMatrix read_spd_file(const std::string& path, PdPolicy policy = PdPolicy::strict);

void write_dictionary(std::ostream& os, const Dictionary& d);
Dictionary read_dictionary(std::istream& is, PdPolicy policy = PdPolicy::strict);
void write_dictionary_file(const std::string& path, const Dictionary& d);
Dictionary read_dictionary_file(const std::string& path,
                                PdPolicy policy = PdPolicy::strict);

struct DatasetPayload {
  std::vector<SpdMatrix> items;
  std::vector<int> labels;
};

void write_dataset(std::ostream& os, const DatasetPayload& ds);
DatasetPayload read_dataset(std::istream& is, PdPolicy policy = PdPolicy::clamp);
void write_dataset_file(const std::string& path, const DatasetPayload& ds);
DatasetPayload read_dataset_file(const std::string& path,
                                 PdPolicy policy = PdPolicy::clamp);

json dataset_to_json(const DatasetPayload& ds);
DatasetPayload dataset_from_json(const json& j, PdPolicy policy = PdPolicy::clamp);

/// One line of a codes file (JSON lines).
struct CodeRecord {
  long index = 0;
  int label = 0;
  Vector coeffs;
  double objective = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

void write_codes_file(const std::string& path, const std::vector<CodeRecord>& codes);
std::vector<CodeRecord> read_codes_file(const std::string& path);

/// CSV with a header row; every cell is preformatted.
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace spd::io
