#pragma once

// Model archive: a plain ustar tarball (inspectable with `tar tf`) holding
//
//   config.json      LDA configuration plus the fitting backend
//   beta.bin         K x V matrix
//   gamma.bin        M x K matrix
//   vocab.txt        vocabulary sidecar, one term per line in index order
//   doc_ids.txt      document id of each gamma row
//   elbo_trace.json  JSON array
//
// Matrix files are a little-endian header (uint64 rows, uint64 cols) followed
// by rows*cols IEEE-754 doubles, row-major and little-endian. Headers carry a
// zero mtime so identical models produce identical archives.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topicmine/error.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/matrix.hpp"
#include "topicmine/text_prep.hpp"

namespace topicmine {

namespace archive_detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace archive_detail

inline std::string encode_matrix(const Matrix& m) {
  std::string out;
  out.reserve(16 + 8 * m.data().size());
  archive_detail::put_u64(out, m.rows());
  archive_detail::put_u64(out, m.cols());
  for (double x : m.data()) archive_detail::put_u64(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

inline Matrix decode_matrix(std::string_view bytes) {
  if (bytes.size() < 16) throw Error(Errc::MalformedArchive, "matrix header truncated");
  const std::uint64_t rows = archive_detail::get_u64(bytes, 0), cols = archive_detail::get_u64(bytes, 8);
  if (cols != 0 && rows > (bytes.size() - 16) / 8 / cols) throw Error(Errc::MalformedArchive, "matrix payload truncated");
  if (bytes.size() != 16 + 8 * rows * cols) throw Error(Errc::MalformedArchive, "matrix payload size mismatch");
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = std::bit_cast<double>(archive_detail::get_u64(bytes, 16 + 8 * i));
  return Matrix(rows, cols, std::move(data));
}

// Minimal ustar reader/writer for regular files.
class TarWriter {
 public:
  void add(std::string_view name, std::string_view content) {
    if (name.size() > 99) throw Error(Errc::MalformedArchive, "entry name too long");
    std::array<char, 512> h{};
    std::memcpy(h.data(), name.data(), name.size());
    octal(h.data() + 100, 8, 0644);
    octal(h.data() + 108, 8, 0);
    octal(h.data() + 116, 8, 0);
    octal(h.data() + 124, 12, content.size());
    octal(h.data() + 136, 12, 0);
    h[156] = '0';
    std::memcpy(h.data() + 257, "ustar", 6);
    std::memcpy(h.data() + 263, "00", 2);
    std::memset(h.data() + 148, ' ', 8);
    unsigned sum = 0;
    for (char c : h) sum += static_cast<unsigned char>(c);
    octal(h.data() + 148, 7, sum);
    out_.append(h.data(), h.size());
    out_.append(content);
    out_.append((512 - content.size() % 512) % 512, '\0');
  }

  std::string finish() && {
    out_.append(1024, '\0');
    return std::move(out_);
  }

 private:
  static void octal(char* field, std::size_t width, std::uint64_t v) {
    // width-1 digits followed by NUL
    for (std::size_t i = width - 1; i-- > 0;) {
      field[i] = static_cast<char>('0' + (v & 7));
      v >>= 3;
    }
    field[width - 1] = '\0';
  }

  std::string out_;
};

inline std::map<std::string, std::string> read_tar(std::string_view bytes) {
  std::map<std::string, std::string> entries;
  std::size_t pos = 0;
  auto parse_octal = [](std::string_view f) {
    std::uint64_t v = 0;
    for (char c : f) {
      if (c == '\0' || c == ' ') break;
      if (c < '0' || c > '7') throw Error(Errc::MalformedArchive, "bad octal field");
      v = v * 8 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  };
  while (pos + 512 <= bytes.size()) {
    const auto h = bytes.substr(pos, 512);
    if (h.find_first_not_of('\0') == std::string_view::npos) break;
    unsigned sum = 0;
    for (std::size_t i = 0; i < 512; ++i) sum += (i >= 148 && i < 156) ? ' ' : static_cast<unsigned char>(h[i]);
    if (sum != parse_octal(h.substr(148, 8))) throw Error(Errc::MalformedArchive, "header checksum mismatch");
    const std::string name(h.substr(0, std::min<std::size_t>(100, h.find('\0'))));
    const std::uint64_t size = parse_octal(h.substr(124, 12));
    pos += 512;
    if (size > bytes.size() - pos) throw Error(Errc::MalformedArchive, "entry " + name + " truncated");
    if (h[156] == '0' || h[156] == '\0') entries[name] = std::string(bytes.substr(pos, size));
    pos += (size + 511) / 512 * 512;
  }
  return entries;
}

struct ModelArchive {
  LdaModel model;
  Vocabulary vocab;
  std::vector<std::string> doc_ids;

  friend bool operator==(const ModelArchive&, const ModelArchive&) = default;
};

inline std::string encode_model(const ModelArchive& a) {
  nlohmann::json config = a.model.config;
  config["backend"] = std::string(to_string(a.model.backend));
  std::ostringstream vocab, ids;
  write_vocabulary(vocab, a.vocab);
  for (const auto& id : a.doc_ids) ids << detail::encode_id(id) << '\n';

  TarWriter tar;
  tar.add("config.json", config.dump(2) + "\n");
  tar.add("beta.bin", encode_matrix(a.model.beta));
  tar.add("gamma.bin", encode_matrix(a.model.gamma));
  tar.add("vocab.txt", vocab.str());
  tar.add("doc_ids.txt", ids.str());
  tar.add("elbo_trace.json", nlohmann::json(a.model.elbo_trace).dump() + "\n");
  return std::move(tar).finish();
}

inline ModelArchive decode_model(std::string_view bytes) {
  auto entries = read_tar(bytes);
  auto need = [&](const std::string& name) -> const std::string& {
    auto it = entries.find(name);
    if (it == entries.end()) throw Error(Errc::MalformedArchive, "missing entry " + name);
    return it->second;
  };
  ModelArchive a;
  try {
    const auto config = nlohmann::json::parse(need("config.json"));
    a.model.config = config.get<LdaConfig>();
    a.model.backend = config.value("backend", std::string("vem")) == "gibbs" ? Backend::Gibbs : Backend::Vem;
    a.model.elbo_trace = nlohmann::json::parse(need("elbo_trace.json")).get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedArchive, e.what());
  }
  a.model.beta = decode_matrix(need("beta.bin"));
  a.model.gamma = decode_matrix(need("gamma.bin"));
  std::istringstream vocab(need("vocab.txt"));
  a.vocab = read_vocabulary(vocab);
  std::istringstream ids(need("doc_ids.txt"));
  for (std::string line; std::getline(ids, line);)
    if (!line.empty()) a.doc_ids.push_back(detail::decode_id(line));

  if (a.model.beta.rows() != a.model.config.k || a.model.beta.cols() != a.vocab.size() ||
      a.model.gamma.rows() != a.doc_ids.size() || a.model.gamma.cols() != a.model.config.k)
    throw Error(Errc::MalformedArchive, "entry dimensions disagree");
  return a;
}

inline void save_model(const std::filesystem::path& path, const ModelArchive& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::UnreadablePath, path.string());
  const auto bytes = encode_model(a);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::UnreadablePath, path.string());
}

inline ModelArchive load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace topicmine
