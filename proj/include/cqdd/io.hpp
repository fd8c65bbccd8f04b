#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqdd/ansatz.hpp"
#include "cqdd/state_set.hpp"
#include "cqdd/train.hpp"

namespace cqdd {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr std::uint32_t kFormatVersion = 1;

// A state set as stored on disk, with the seed that produced it.
struct StoredSet {
  StateSet set;
  std::uint64_t seed = 0;
};

// Binary container: "QSET", u32 version, u32 qubits, u64 N, u64 seed,
// u32 label length, label bytes, u8 weighted, [N weights], then N * 2^n
// (re, im) pairs. All numbers little-endian; doubles are raw IEEE-754.
void write_qset(const fs::path& path, const StateSet& set, std::uint64_t seed);
StoredSet read_qset(const fs::path& path);

// JSON-lines alternative: a header object, then one {"re","im"[,"w"]} per state.
void write_qset_jsonl(const fs::path& path, const StateSet& set, std::uint64_t seed);
StoredSet read_qset_jsonl(const fs::path& path);

// Dispatches on the extension (.qset or .jsonl).
StoredSet read_state_set(const fs::path& path);

json model_to_json(const DenoiseModel& model);
DenoiseModel model_from_json(const json& j);
void write_model(const fs::path& path, const DenoiseModel& model);
DenoiseModel read_model(const fs::path& path);

// One line per record, no timing fields, so reruns compare byte for byte.
std::string loss_record_line(const LossRecord& r);

// Shortest text that parses back to the same double.
std::string format_double(double x);

// Accumulates rows and writes a CSV with a header line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const fs::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

// Label text safe to embed in a file name.
std::string file_stem_for(const std::string& label);

// Lists every file an invocation writes, with content checksums.
class Manifest {
 public:
  Manifest(std::string command, fs::path out_dir);

  // Records a file already written under out_dir.
  void add(const fs::path& path);
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }
  void mark_partial(const std::string& reason);
  const fs::path& out_dir() const { return out_dir_; }

  // Writes manifest.json; the manifest does not list itself.
  void write(double wall_seconds) const;

 private:
  std::string command_;
  fs::path out_dir_;
  std::vector<fs::path> files_;
  json extra_ = json::object();
  std::string partial_;
};

}  // namespace cqdd
