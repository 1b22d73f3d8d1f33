#include "coauth/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "coauth/error.hpp"

namespace coauth {

namespace {

using nlohmann::json;

const json* require_field(const json& record, const char* name, std::string& problem) {
  auto it = record.find(name);
  if (it == record.end()) {
    problem = std::string("missing field '") + name + "'";
    return nullptr;
  }
  return &*it;
}

bool has_control_separator(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

// Returns an empty string on success, otherwise the reason the record is rejected.
std::string decode_record(const std::string& line, const ParseOptions& options, Document& doc) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::parse_error& e) {
    return std::string("invalid JSON: ") + e.what();
  }
  if (!record.is_object()) return "record is not a JSON object";

  std::string problem;
  for (const char* name : {"id", "title", "abstract", "authors", "date"}) {
    if (require_field(record, name, problem) == nullptr) return problem;
  }
  for (const char* name : {"id", "title", "abstract", "date"}) {
    if (!record[name].is_string()) return std::string("field '") + name + "' is not a string";
  }
  doc.doc_id = record["id"].get<std::string>();
  if (doc.doc_id.empty()) return "field 'id' is empty";
  if (has_control_separator(doc.doc_id)) return "field 'id' contains a tab or newline";
  doc.title = record["title"].get<std::string>();
  doc.abstract = record["abstract"].get<std::string>();

  const json& authors = record["authors"];
  if (!authors.is_array()) return "field 'authors' is not an array";
  if (authors.empty()) return "field 'authors' is empty";
  doc.authors.clear();
  for (const auto& a : authors) {
    if (!a.is_string()) return "field 'authors' has a non-string entry";
    doc.authors.push_back(a.get<std::string>());
  }

  const auto month = YearMonth::parse(record["date"].get<std::string>());
  if (!month) return "field 'date' is not YYYY-MM";
  doc.month = *month;
  if (options.window_begin && doc.month < *options.window_begin)
    return "date " + doc.month.str() + " before corpus window";
  if (options.window_end && doc.month > *options.window_end)
    return "date " + doc.month.str() + " after corpus window";
  return {};
}

}  // namespace

Corpus parse_corpus(std::istream& in, const ParseOptions& options) {
  if (!in) throw Error(ErrorCode::kIo, "corpus stream is not readable");
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    Document doc;
    std::string problem = decode_record(line, options, doc);
    if (problem.empty() && !seen.insert(doc.doc_id).second)
      problem = "duplicate id '" + doc.doc_id + "'";
    if (!problem.empty()) {
      if (options.strict)
        throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + problem);
      corpus.errors.push_back({line_no, std::move(problem)});
      continue;
    }
    corpus.documents.push_back(std::move(doc));
  }
  if (in.bad()) throw Error(ErrorCode::kIo, "corpus stream read failed");
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read corpus " + path.string());
  return parse_corpus(in, options);
}

std::string serialize_corpus(std::span<const Document> documents) {
  std::string out;
  for (const auto& doc : documents) {
    // ordered_json keeps the canonical field order stable across runs.
    nlohmann::ordered_json record;
    record["id"] = doc.doc_id;
    record["title"] = doc.title;
    record["abstract"] = doc.abstract;
    record["authors"] = doc.authors;
    record["date"] = doc.month.str();
    out += record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::optional<YearMonth> earliest_month(std::span<const Document> documents) {
  if (documents.empty()) return std::nullopt;
  YearMonth best = documents.front().month;
  for (const auto& d : documents) best = std::min(best, d.month);
  return best;
}

std::string_view convention_name(NameConvention convention) {
  return convention == NameConvention::kFullName ? "full" : "initial";
}

NameConvention parse_convention(std::string_view text) {
  if (text == "full" || text == "FullName") return NameConvention::kFullName;
  if (text == "initial" || text == "FirstInitialLastName")
    return NameConvention::kFirstInitialLastName;
  throw Error(ErrorCode::kConfig, "unknown naming convention '" + std::string(text) + "'");
}

namespace {

// Decodes one UTF-8 sequence starting at s[i]; advances i. Invalid bytes
// decode as U+FFFD and consume one byte.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t k) { return static_cast<char32_t>(s[i + k] & 0x3F); };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && b0 >= 0xC2 && cont(1)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) |
                  (byte(2) << 6) | byte(3);
    i += 4;
    return cp;
  }
  ++i;
  return 0xFFFD;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200A);
}

// Letters kept in a label: ASCII letters plus non-ASCII code points outside
// the Latin-1 symbol block, general punctuation, and the replacement character.
bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp < 0xC0) return false;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp == 0xFFFD) return false;
  return true;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

}  // namespace

AuthorId normalize_author(std::string_view raw, NameConvention convention,
                          std::string_view doc_id) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = next_code_point(raw, i);
    if (is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (is_letter(cp)) {
      append_utf8(current, to_lower(cp));
    }
    // anything else is punctuation and vanishes without splitting the token
  }
  if (!current.empty()) tokens.push_back(std::move(current));

  if (tokens.empty()) {
    std::string msg = "author name '" + std::string(raw) + "' is empty after normalization";
    if (!doc_id.empty()) msg += " in document '" + std::string(doc_id) + "'";
    throw Error(ErrorCode::kInvalidArgument, msg);
  }

  AuthorId id;
  id.convention = convention;
  if (convention == NameConvention::kFirstInitialLastName && tokens.size() > 1) {
    std::size_t first_len = 1;
    const auto lead = static_cast<unsigned char>(tokens.front()[0]);
    if (lead >= 0xF0) first_len = 4;
    else if (lead >= 0xE0) first_len = 3;
    else if (lead >= 0xC0) first_len = 2;
    id.label = tokens.front().substr(0, first_len) + " " + tokens.back();
    return id;
  }
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (t) id.label += ' ';
    id.label += tokens[t];
  }
  return id;
}

}  // namespace coauth
