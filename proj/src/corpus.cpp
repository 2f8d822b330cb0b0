// Copyright 2026 The textguide Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "textguide/corpus.hpp"

#include <locale.h>
#include <wctype.h>

#include <algorithm>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "textguide/error.hpp"
#include "textguide/io.hpp"

namespace textguide {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `pos`, advancing it. Malformed or
// overlong sequences yield U+FFFD and consume a single byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Unicode White_Space property.
bool is_unicode_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

// Case mapping and alphanumeric classes come from the C.UTF-8 locale, falling
// back to ASCII rules if the locale is unavailable.
class CharClasses {
 public:
  CharClasses() : locale_(::newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr))) {}
  ~CharClasses() {
    if (locale_ != static_cast<locale_t>(nullptr)) ::freelocale(locale_);
  }
  CharClasses(const CharClasses&) = delete;
  CharClasses& operator=(const CharClasses&) = delete;

  char32_t lower(char32_t c) const {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    if (locale_ == static_cast<locale_t>(nullptr)) return c;
    return static_cast<char32_t>(::towlower_l(static_cast<wint_t>(c), locale_));
  }

  bool alnum(char32_t c) const {
    if (c < 0x80) {
      return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    if (locale_ == static_cast<locale_t>(nullptr)) return false;
    return ::iswalnum_l(static_cast<wint_t>(c), locale_) != 0;
  }

 private:
  locale_t locale_;
};

const CharClasses& char_classes() {
  static const CharClasses classes;
  return classes;
}

std::string row_context(std::size_t row) { return "row " + std::to_string(row); }

// --- CSV (RFC 4180) ---------------------------------------------------------

// Reads one record; returns false at clean end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t row) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool in_quotes = false;
  bool was_quoted = false;
  for (;;) {
    const int ci = in.get();
    if (ci == std::char_traits<char>::eof()) {
      if (in_quotes) {
        throw Error(ErrorCode::kMalformedRow, row_context(row) + ": unterminated quoted field");
      }
      fields.push_back(std::move(field));
      return true;
    }
    const char c = static_cast<char>(ci);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || was_quoted) {
        throw Error(ErrorCode::kMalformedRow, row_context(row) + ": stray quote inside field");
      }
      in_quotes = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c == '\r' && in.peek() == '\n') {
      in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      if (was_quoted) {
        throw Error(ErrorCode::kMalformedRow, row_context(row) + ": text after closing quote");
      }
      field.push_back(c);
    }
  }
}

void write_csv_field(std::string& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::vector<TextInstance> parse_csv(std::istream& in) {
  std::vector<std::string> header;
  if (!read_csv_record(in, header, 0)) return {};
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
  int id_col = -1, text_col = -1, label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "id") id_col = static_cast<int>(i);
    if (header[i] == "text") text_col = static_cast<int>(i);
    if (header[i] == "label") label_col = static_cast<int>(i);
  }
  if (text_col < 0 || label_col < 0) {
    throw Error(ErrorCode::kMalformedRow, "header: expected columns id,text,label");
  }
  std::vector<TextInstance> rows;
  std::vector<std::string> fields;
  for (std::size_t row = 0; read_csv_record(in, fields, row); ++row) {
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow, row_context(row) + ": expected " +
                                                std::to_string(header.size()) + " fields, got " +
                                                std::to_string(fields.size()));
    }
    TextInstance inst;
    inst.id = id_col >= 0 ? fields[static_cast<std::size_t>(id_col)] : std::string();
    if (inst.id.empty()) inst.id = std::to_string(row);
    inst.text = std::move(fields[static_cast<std::size_t>(text_col)]);
    inst.label = std::move(fields[static_cast<std::size_t>(label_col)]);
    rows.push_back(std::move(inst));
  }
  return rows;
}

// --- JSONL -----------------------------------------------------------------

std::vector<TextInstance> parse_jsonl(std::istream& in) {
  std::vector<TextInstance> rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRow, row_context(row) + ": " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kMalformedRow, row_context(row) + ": not a JSON object");
    }
    auto required_string = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_string()) {
        throw Error(ErrorCode::kMalformedRow,
                    row_context(row) + ": missing or non-string \"" + key + "\"");
      }
      return it->get<std::string>();
    };
    TextInstance inst;
    if (auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error(ErrorCode::kMalformedRow, row_context(row) + ": \"id\" must be a string");
      }
      inst.id = it->get<std::string>();
    } else {
      inst.id = std::to_string(row);
    }
    inst.text = required_string("text");
    inst.label = required_string("label");
    rows.push_back(std::move(inst));
    ++row;
  }
  return rows;
}

}  // namespace

Corpus::Corpus(std::vector<TextInstance> instances) : instances_(std::move(instances)) {
  std::set<std::string_view> seen;
  std::set<std::string> labels;
  for (std::size_t row = 0; row < instances_.size(); ++row) {
    const auto& inst = instances_[row];
    if (inst.text.empty()) {
      throw Error(ErrorCode::kEmptyText, row_context(row) + " (id '" + inst.id + "') has empty text");
    }
    if (!seen.insert(inst.id).second) {
      throw Error(ErrorCode::kDuplicateId, "id '" + inst.id + "' repeated at " + row_context(row));
    }
    labels.insert(inst.label);
  }
  labels_.assign(labels.begin(), labels.end());
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown corpus format '" + std::string(name) + "'");
}

std::string_view corpus_format_name(CorpusFormat format) {
  return format == CorpusFormat::kCsv ? "csv" : "jsonl";
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::kCsv : CorpusFormat::kJsonl;
}

TokenSequence tokenize(std::string_view text) {
  const auto& classes = char_classes();
  TokenSequence tokens;
  std::vector<char32_t> piece;
  auto flush = [&] {
    std::size_t begin = 0;
    std::size_t end = piece.size();
    while (begin < end && !classes.alnum(piece[begin])) ++begin;
    while (end > begin && !classes.alnum(piece[end - 1])) --end;
    if (begin < end) {
      std::string token;
      for (std::size_t i = begin; i < end; ++i) encode_utf8(piece[i], token);
      tokens.push_back(std::move(token));
    }
    piece.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t c = decode_utf8(text, pos);
    if (is_unicode_space(c)) {
      flush();
    } else {
      piece.push_back(classes.lower(c));
    }
  }
  flush();
  return tokens;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  std::size_t total = tokens.empty() ? 0 : tokens.size() - 1;
  for (const auto& t : tokens) total += t.size();
  out.reserve(total);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out.append(tokens[i]);
  }
  return out;
}

Corpus parse_corpus(std::istream& in, CorpusFormat format) {
  return Corpus(format == CorpusFormat::kCsv ? parse_csv(in) : parse_jsonl(in));
}

std::string format_corpus(const Corpus& corpus, CorpusFormat format) {
  std::string out;
  if (format == CorpusFormat::kCsv) {
    out = "id,text,label\n";
    for (const auto& inst : corpus.instances()) {
      write_csv_field(out, inst.id);
      out.push_back(',');
      write_csv_field(out, inst.text);
      out.push_back(',');
      write_csv_field(out, inst.label);
      out.push_back('\n');
    }
    return out;
  }
  for (const auto& inst : corpus.instances()) {
    nlohmann::ordered_json obj;
    obj["id"] = inst.id;
    obj["text"] = inst.text;
    obj["label"] = inst.label;
    out += obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out.push_back('\n');
  }
  return out;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::istringstream in(read_file(path));
  try {
    return parse_corpus(in, format);
  } catch (const Error& e) {
    Error::rethrow_with_context(e, path.string());
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  write_file_atomic(path, format_corpus(corpus, format));
}

std::string corpus_sha256(const Corpus& corpus) {
  std::vector<const TextInstance*> sorted;
  sorted.reserve(corpus.size());
  for (const auto& inst : corpus.instances()) sorted.push_back(&inst);
  std::sort(sorted.begin(), sorted.end(),
            [](const TextInstance* a, const TextInstance* b) { return a->id < b->id; });
  std::string buf;
  for (const auto* inst : sorted) {
    buf += inst->id;
    buf.push_back('\x1f');
    buf += inst->text;
    buf.push_back('\x1f');
    buf += inst->label;
    buf.push_back('\x1e');
  }
  return sha256_hex(buf);
}

FoldAssignment stratified_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorCode::kInvalidArgument, "fold count must be >= 2, got " + std::to_string(k));
  }
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) members[corpus[i].label].push_back(i);

  FoldAssignment result;
  result.k = k;
  result.folds.assign(corpus.size(), 0);
  std::size_t cursor = 0;
  std::uint64_t class_index = 0;
  for (auto& [label, rows] : members) {
    std::sort(rows.begin(), rows.end(),
              [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });
    seeded_shuffle(rows, mix_seed(seed, class_index++));
    if (rows.size() < k) {
      result.warnings.push_back("ClassTooSmall: class '" + label + "' has " +
                                std::to_string(rows.size()) + " member(s) for " +
                                std::to_string(k) + " folds");
    }
    for (std::size_t row : rows) {
      result.folds[row] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) result.by_id.emplace(corpus[i].id, result.folds[i]);
  return result;
}

}  // namespace textguide
