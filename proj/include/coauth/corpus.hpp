#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coauth/month.hpp"

namespace coauth {

/// One article record.
struct Document {
  std::string doc_id;
  std::string title;
  std::string abstract;
  std::vector<std::string> authors;  // raw names, as published
  YearMonth month;

  bool operator==(const Document&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<ParseIssue> errors;
};

struct ParseOptions {
  /// Any malformed line becomes a fatal Error(kParse).
  bool strict = false;
  /// Inclusive bounds; records outside are reported as malformed.
  std::optional<YearMonth> window_begin;
  std::optional<YearMonth> window_end;
};

/// Reads JSON Lines records with fields id, title, abstract, authors, date.
/// Malformed lines are collected in Corpus::errors and skipped.
Corpus parse_corpus(std::istream& in, const ParseOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const ParseOptions& options = {});

/// Inverse of parse_corpus: one JSON object per line in the canonical field order.
std::string serialize_corpus(std::span<const Document> documents);

/// Earliest publication month; std::nullopt for an empty corpus.
std::optional<YearMonth> earliest_month(std::span<const Document> documents);

enum class NameConvention { kFullName, kFirstInitialLastName };

std::string_view convention_name(NameConvention convention);
NameConvention parse_convention(std::string_view text);

struct AuthorId {
  std::string label;
  NameConvention convention = NameConvention::kFullName;

  bool operator==(const AuthorId&) const = default;
};

/// Removes punctuation, lowercases, and collapses whitespace. Under
/// kFirstInitialLastName only the first letter of the first token and the
/// whole last token are kept. Throws Error(kInvalidArgument) when nothing
/// remains; `doc_id` is named in that message when given.
AuthorId normalize_author(std::string_view raw, NameConvention convention,
                          std::string_view doc_id = {});

}  // namespace coauth
