#include "cqdd/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cqdd/errors.hpp"

namespace cqdd {

static_assert(std::endian::native == std::endian::little, "the binary formats assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'Q', 'S', 'E', 'T'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const fs::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated file " + path.string());
  return v;
}

std::ofstream open_out(const fs::path& path, bool binary) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const fs::path& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw IoError("cannot open " + path.string());
  return is;
}

void finish(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw IoError("write failed for " + path.string());
}

StateVector state_from(std::vector<Amplitude> amps, const fs::path& path) {
  try {
    return StateVector::from_amplitudes(std::move(amps));
  } catch (const InvalidArgument& e) {
    throw IoError("bad state in " + path.string() + ": " + e.what());
  }
}

json json_of(const ClassCondition& c) {
  return {{"label", c.label}, {"mu", c.mu}, {"basis_index", c.basis_index}};
}

}  // namespace

void write_qset(const fs::path& path, const StateSet& set, std::uint64_t seed) {
  validate(set);
  auto os = open_out(path, true);
  os.write(kMagic, 4);
  put(os, kFormatVersion);
  put(os, static_cast<std::uint32_t>(set.num_qubits()));
  put(os, static_cast<std::uint64_t>(set.size()));
  put(os, seed);
  put(os, static_cast<std::uint32_t>(set.label.size()));
  os.write(set.label.data(), static_cast<std::streamsize>(set.label.size()));
  put(os, static_cast<std::uint8_t>(set.weighted() ? 1 : 0));
  for (double w : set.weights) put(os, w);
  for (const auto& s : set.states) {
    for (const auto& a : s.amplitudes()) {
      put(os, a.real());
      put(os, a.imag());
    }
  }
  finish(os, path);
}

StoredSet read_qset(const fs::path& path) {
  auto is = open_in(path, true);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + " is not a QSET file");
  const auto version = get<std::uint32_t>(is, path);
  if (version != kFormatVersion) throw IoError("unsupported QSET version " + std::to_string(version));
  const auto qubits = get<std::uint32_t>(is, path);
  const auto count = get<std::uint64_t>(is, path);
  if (qubits < 1 || qubits > 30) throw IoError("implausible qubit count in " + path.string());
  StoredSet out;
  out.seed = get<std::uint64_t>(is, path);
  const auto label_len = get<std::uint32_t>(is, path);
  out.set.label.resize(label_len);
  if (!is.read(out.set.label.data(), label_len)) throw IoError("truncated file " + path.string());
  const bool weighted = get<std::uint8_t>(is, path) != 0;
  if (weighted) {
    out.set.weights.resize(count);
    for (auto& w : out.set.weights) w = get<double>(is, path);
  }
  const std::size_t dim = std::size_t{1} << qubits;
  out.set.states.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<Amplitude> amps(dim);
    for (auto& a : amps) {
      const double re = get<double>(is, path);
      const double im = get<double>(is, path);
      a = {re, im};
    }
    out.set.states.push_back(state_from(std::move(amps), path));
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in " + path.string());
  validate(out.set);
  return out;
}

void write_qset_jsonl(const fs::path& path, const StateSet& set, std::uint64_t seed) {
  validate(set);
  auto os = open_out(path, false);
  json head = {{"format", "qset-jsonl"}, {"version", kFormatVersion}, {"qubits", set.num_qubits()},
               {"N", set.size()}, {"label", set.label}, {"seed", seed}};
  os << head.dump() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    json row;
    json re = json::array(), im = json::array();
    for (const auto& a : set.states[i].amplitudes()) {
      re.push_back(a.real());
      im.push_back(a.imag());
    }
    row["re"] = std::move(re);
    row["im"] = std::move(im);
    if (set.weighted()) row["w"] = set.weights[i];
    os << row.dump() << '\n';
  }
  finish(os, path);
}

StoredSet read_qset_jsonl(const fs::path& path) {
  auto is = open_in(path, false);
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty file " + path.string());
  StoredSet out;
  std::size_t count = 0;
  try {
    const json head = json::parse(line);
    if (head.at("format") != "qset-jsonl") throw IoError(path.string() + " is not a qset-jsonl file");
    out.seed = head.at("seed").get<std::uint64_t>();
    out.set.label = head.at("label").get<std::string>();
    count = head.at("N").get<std::size_t>();
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const json row = json::parse(line);
      const auto& re = row.at("re");
      const auto& im = row.at("im");
      if (re.size() != im.size()) throw IoError("ragged amplitude row in " + path.string());
      std::vector<Amplitude> amps(re.size());
      for (std::size_t k = 0; k < re.size(); ++k) amps[k] = {re[k].get<double>(), im[k].get<double>()};
      out.set.states.push_back(state_from(std::move(amps), path));
      if (row.contains("w")) out.set.weights.push_back(row["w"].get<double>());
    }
  } catch (const json::exception& e) {
    throw IoError("malformed " + path.string() + ": " + e.what());
  }
  if (out.set.size() != count) throw IoError("state count mismatch in " + path.string());
  validate(out.set);
  return out;
}

StoredSet read_state_set(const fs::path& path) {
  if (path.extension() == ".jsonl") return read_qset_jsonl(path);
  return read_qset(path);
}

json model_to_json(const DenoiseModel& model) {
  json classes = json::array();
  for (const auto& c : model.classes) classes.push_back(json_of(c));
  return {{"format", "cqdd-model"},
          {"version", kFormatVersion},
          {"n", model.spec.n},
          {"n_a", model.spec.n_a},
          {"L", model.spec.L},
          {"conditioning", to_string(model.spec.conditioning)},
          {"T", model.T},
          {"seed", model.seed},
          {"classes", classes},
          {"thetas", model.thetas}};
}

DenoiseModel model_from_json(const json& j) {
  DenoiseModel m;
  try {
    if (j.at("format") != "cqdd-model") throw IoError("not a model file");
    m.spec.n = j.at("n").get<int>();
    m.spec.n_a = j.at("n_a").get<int>();
    m.spec.L = j.at("L").get<int>();
    m.spec.conditioning = parse_conditioning_mode(j.at("conditioning").get<std::string>());
    m.T = j.at("T").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("classes")) {
      m.classes.push_back({c.at("label").get<std::string>(), c.at("mu").get<double>(),
                           c.at("basis_index").get<std::uint64_t>()});
    }
    m.thetas = j.at("thetas").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model: ") + e.what());
  }
  validate(m);
  return m;
}

void write_model(const fs::path& path, const DenoiseModel& model) {
  write_text(path, model_to_json(model).dump(1) + "\n");
}

DenoiseModel read_model(const fs::path& path) {
  try {
    return model_from_json(json::parse(read_text(path)));
  } catch (const json::exception& e) {
    throw IoError("malformed model " + path.string() + ": " + e.what());
  }
}

std::string loss_record_line(const LossRecord& r) {
  json j = {{"step", r.step}, {"iteration", r.iteration}, {"loss", r.loss}, {"best", r.best}};
  return j.dump();
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw InvariantViolation("double formatting failed");
  return std::string(buf.data(), end);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw InvalidArgument("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        os << cells[i];
        continue;
      }
      os << '"';
      for (char c : cells[i]) os << (c == '"' ? std::string("\"\"") : std::string(1, c));
      os << '"';
    }
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void CsvTable::write(const fs::path& path) const { write_text(path, str()); }

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path, true);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish(os, path);
}

std::string read_text(const fs::path& path) {
  auto is = open_in(path, true);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

std::string file_stem_for(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
      out.push_back(c);
    } else if (c == '+') {
      out += "plus";
    } else {
      out.push_back('_');
    }
  }
  return out.empty() ? "class" : out;
}

Manifest::Manifest(std::string command, fs::path out_dir) : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

void Manifest::add(const fs::path& path) {
  fs::path rel = path.lexically_relative(out_dir_);
  if (rel.empty() || *rel.begin() == "..") rel = path;
  if (std::find(files_.begin(), files_.end(), rel) == files_.end()) files_.push_back(rel);
}

void Manifest::mark_partial(const std::string& reason) { partial_ = reason; }

void Manifest::write(double wall_seconds) const {
  json files = json::array();
  for (const auto& rel : files_) {
    const fs::path full = out_dir_ / rel;
    files.push_back({{"path", rel.generic_string()},
                     {"bytes", fs::file_size(full)},
                     {"sha256", sha256_file(full)}});
  }
  json j = {{"artifact", "cqdd"}, {"artifact_version", "1.0.0"}, {"command", command_},
            {"status", partial_.empty() ? "complete" : "partial"}, {"wall_seconds", wall_seconds},
            {"files", files}};
  if (!partial_.empty()) j["partial_reason"] = partial_;
  for (const auto& [k, v] : extra_.items()) j[k] = v;
  write_text(out_dir_ / "manifest.json", j.dump(1) + "\n");
}

}  // namespace cqdd
