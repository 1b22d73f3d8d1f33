#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coauth/corpus.hpp"

namespace coauth {

using TermId = std::uint32_t;

struct TextResources {
  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, std::string> lemmas;  // surface form -> lemma

  /// Stopword files are newline-delimited; the lexicon holds "term lemma" per line.
  static TextResources load(std::span<const std::filesystem::path> stopword_files,
                            const std::optional<std::filesystem::path>& lexicon_file);
  /// Same formats, from in-memory text.
  static TextResources parse(std::span<const std::string> stopword_texts,
                             std::optional<std::string_view> lexicon_text);
};

/// Rule-based plural stripper used when the lexicon has no entry.
std::string strip_suffix(std::string_view token);

/// Title and abstract, lowercased, split on non-letters, tokens of length 1
/// and stopwords dropped, lemmatized. Order and duplicates are kept.
std::vector<std::string> preprocess_text(std::string_view text, const TextResources& resources);
std::vector<std::string> preprocess_document(const Document& doc, const TextResources& resources);

struct RawTokens {
  std::string doc_id;
  YearMonth month;
  std::vector<std::string> tokens;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> terms, std::size_t min_count = 1);

  std::size_t size() const { return terms_.size(); }
  const std::string& term(TermId id) const { return terms_.at(id); }
  const std::vector<std::string>& terms() const { return terms_; }
  std::optional<TermId> find(std::string_view term) const;
  std::size_t min_count() const { return min_count_; }

  /// SHA-256 over the newline-terminated term list in id order.
  std::string digest() const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> index_;
  std::size_t min_count_ = 1;
};

struct TokenizedDoc {
  std::string doc_id;
  std::vector<TermId> tokens;
  YearMonth month;

  bool operator==(const TokenizedDoc&) const = default;
};

struct TokenizedCorpus {
  Vocabulary vocabulary;
  std::vector<TokenizedDoc> docs;
};

/// Keeps terms with corpus frequency >= min_count; ids follow first appearance.
TokenizedCorpus build_vocabulary(std::span<const RawTokens> token_lists, std::size_t min_count);

/// Maps tokens through an existing vocabulary; unknown terms are dropped.
std::vector<TokenizedDoc> map_to_vocabulary(const Vocabulary& vocabulary,
                                            std::span<const RawTokens> token_lists);

/// Versioned text format, see docs/formats.md.
std::string serialize_tokenized(const TokenizedCorpus& corpus);
TokenizedCorpus parse_tokenized(std::string_view text);

}  // namespace coauth
