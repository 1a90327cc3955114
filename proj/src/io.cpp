// Copyright 2026 The noisyht authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noisyht/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace noisyht {

namespace {

using nlohmann::json;

double number_from(const json& j, const char* where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument(std::string(where) +
                                  ": bad decimal string '" + s + "'");
    }
    return value;
  }
  throw std::invalid_argument(std::string(where) + ": expected a decimal");
}

Matrix matrix_from(const json& j, const char* where) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw std::invalid_argument(std::string(where) +
                                ": expected nested arrays");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw std::invalid_argument(std::string(where) + ": ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = number_from(j[r][c], where);
    }
  }
  return m;
}

Alphabet alphabet_from(const json& j, const char* name) {
  if (j.is_number_integer()) {
    return Alphabet(j.get<int>());
  }
  if (j.is_array()) {
    std::vector<std::string> labels;
    for (const auto& item : j) {
      if (!item.is_string()) {
        throw std::invalid_argument(std::string("alphabet ") + name +
                                    ": labels must be strings");
      }
      labels.push_back(item.get<std::string>());
    }
    return Alphabet(static_cast<int>(labels.size()), std::move(labels));
  }
  throw std::invalid_argument(std::string("alphabet ") + name +
                              ": expected size or label list");
}

Alphabet lookup(const std::map<std::string, Alphabet>& alphabets,
                const std::string& name, int fallback_size) {
  const auto it = alphabets.find(name);
  return it != alphabets.end() ? it->second : Alphabet(fallback_size);
}

void emit_matrix(std::string& out, const Matrix& m) {
  out += '[';
  for (int r = 0; r < m.rows(); ++r) {
    if (r > 0) out += ", ";
    out += '[';
    for (int c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ", ";
      out += format_number(m(r, c));
    }
    out += ']';
  }
  out += ']';
}

void emit_alphabet(std::string& out, const Alphabet& a) {
  if (a.labels.empty()) {
    out += std::to_string(a.size);
    return;
  }
  out += '[';
  for (int i = 0; i < a.size; ++i) {
    if (i > 0) out += ", ";
    out += json(a.labels[i]).dump();
  }
  out += ']';
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Document parse_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("document: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("document: expected a JSON object");
  }

  Document doc;
  if (j.contains("alphabets")) {
    if (!j["alphabets"].is_object()) {
      throw std::invalid_argument("document: alphabets must be an object");
    }
    for (const auto& [name, spec] : j["alphabets"].items()) {
      doc.alphabets.emplace(name, alphabet_from(spec, name.c_str()));
    }
  }
  if (j.contains("joint")) {
    Matrix m = matrix_from(j["joint"], "joint");
    const Alphabet u = lookup(doc.alphabets, "u", static_cast<int>(m.rows()));
    const Alphabet v = lookup(doc.alphabets, "v", static_cast<int>(m.cols()));
    doc.joint = JointPmf(u, v, std::move(m));
  }
  if (j.contains("channel")) {
    Matrix m = matrix_from(j["channel"], "channel");
    const Alphabet x = lookup(doc.alphabets, "x", static_cast<int>(m.rows()));
    const Alphabet y = lookup(doc.alphabets, "y", static_cast<int>(m.cols()));
    doc.channel = CondPmf(x, y, std::move(m));
  }
  return doc;
}

Document load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open document: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

std::string serialize_document(const Document& doc) {
  std::string out = "{\n";
  bool first_section = true;
  if (!doc.alphabets.empty()) {
    out += "  \"alphabets\": {";
    bool first = true;
    for (const auto& [name, alphabet] : doc.alphabets) {
      if (!first) out += ", ";
      first = false;
      out += json(name).dump();
      out += ": ";
      emit_alphabet(out, alphabet);
    }
    out += '}';
    first_section = false;
  }
  if (doc.joint) {
    if (!first_section) out += ",\n";
    out += "  \"joint\": ";
    emit_matrix(out, doc.joint->probs());
    first_section = false;
  }
  if (doc.channel) {
    if (!first_section) out += ",\n";
    out += "  \"channel\": ";
    emit_matrix(out, doc.channel->rows());
    first_section = false;
  }
  out += "\n}\n";
  return out;
}

void save_document(const Document& doc, const std::string& path) {
  atomic_write_text(path, serialize_document(doc));
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace noisyht
