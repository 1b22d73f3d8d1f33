#include "coauth/tokenize.hpp"

#include <sstream>

#include "coauth/error.hpp"
#include "coauth/io.hpp"

namespace coauth {

namespace {

constexpr std::string_view kTokensMagic = "coauth-tokens 1";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

TextResources TextResources::load(std::span<const std::filesystem::path> stopword_files,
                                  const std::optional<std::filesystem::path>& lexicon_file) {
  std::vector<std::string> texts;
  for (const auto& path : stopword_files) texts.push_back(read_file(path));
  std::optional<std::string> lexicon;
  if (lexicon_file) lexicon = read_file(*lexicon_file);
  return parse(texts, lexicon);
}

TextResources TextResources::parse(std::span<const std::string> stopword_texts,
                                   std::optional<std::string_view> lexicon_text) {
  auto lines_of = [](std::string_view text) {
    std::vector<std::string> out;
    for (const auto& raw : split(text, '\n')) {
      const auto t = trim(raw);
      if (!t.empty() && t.front() != '#') out.emplace_back(t);
    }
    return out;
  };
  TextResources r;
  for (const auto& text : stopword_texts) {
    for (auto& word : lines_of(text)) r.stopwords.insert(std::move(word));
  }
  if (lexicon_text) {
    std::size_t n = 0;
    for (const auto& line : lines_of(*lexicon_text)) {
      ++n;
      const auto sep = line.find_first_of(" \t");
      if (sep == std::string::npos)
        throw Error(ErrorCode::kParse, "lexicon entry " + std::to_string(n) + " needs 'term lemma'");
      r.lemmas.emplace(line.substr(0, sep), std::string(trim(std::string_view(line).substr(sep + 1))));
    }
  }
  return r;
}

std::string strip_suffix(std::string_view token) {
  std::string t(token);
  if (t.size() <= 3) return t;
  if (ends_with(t, "ies") && t.size() > 4) return t.substr(0, t.size() - 3) + "y";
  if (ends_with(t, "sses") || ends_with(t, "xes") || ends_with(t, "ches") ||
      ends_with(t, "shes"))
    return t.substr(0, t.size() - 2);
  if (ends_with(t, "ss") || ends_with(t, "us") || ends_with(t, "is")) return t;
  if (ends_with(t, "s")) return t.substr(0, t.size() - 1);
  return t;
}

std::vector<std::string> preprocess_text(std::string_view text, const TextResources& resources) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !resources.stopwords.contains(current)) {
      auto it = resources.lemmas.find(current);
      out.push_back(it != resources.lemmas.end() ? it->second : strip_suffix(current));
    }
    current.clear();
  };
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') {
      current.push_back(static_cast<char>(c + 32));
    } else if (c >= 'a' && c <= 'z') {
      current.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> preprocess_document(const Document& doc, const TextResources& resources) {
  std::string text = doc.title;
  text += ' ';
  text += doc.abstract;
  return preprocess_text(text, resources);
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::size_t min_count)
    : terms_(std::move(terms)), min_count_(min_count) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second)
      throw Error(ErrorCode::kInvalidArgument, "duplicate vocabulary term '" + terms_[i] + "'");
  }
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::digest() const {
  std::string joined;
  for (const auto& t : terms_) {
    joined += t;
    joined += '\n';
  }
  return sha256_hex(joined);
}

TokenizedCorpus build_vocabulary(std::span<const RawTokens> token_lists, std::size_t min_count) {
  if (min_count < 1) throw Error(ErrorCode::kInvalidArgument, "min_count must be >= 1");
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> first_seen;
  for (const auto& doc : token_lists) {
    for (const auto& tok : doc.tokens) {
      auto [it, inserted] = counts.try_emplace(tok, 0);
      if (inserted) first_seen.push_back(tok);
      ++it->second;
    }
  }
  std::vector<std::string> kept;
  for (auto& term : first_seen) {
    if (counts[term] >= min_count) kept.push_back(std::move(term));
  }
  TokenizedCorpus out{Vocabulary(std::move(kept), min_count), {}};
  out.docs = map_to_vocabulary(out.vocabulary, token_lists);
  return out;
}

std::vector<TokenizedDoc> map_to_vocabulary(const Vocabulary& vocabulary,
                                            std::span<const RawTokens> token_lists) {
  std::vector<TokenizedDoc> docs;
  docs.reserve(token_lists.size());
  for (const auto& raw : token_lists) {
    TokenizedDoc doc{raw.doc_id, {}, raw.month};
    for (const auto& tok : raw.tokens) {
      if (auto id = vocabulary.find(tok)) doc.tokens.push_back(*id);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string serialize_tokenized(const TokenizedCorpus& corpus) {
  std::string out;
  out += kTokensMagic;
  out += '\n';
  out += "min_count " + std::to_string(corpus.vocabulary.min_count()) + '\n';
  out += "vocabulary " + std::to_string(corpus.vocabulary.size()) + '\n';
  for (const auto& t : corpus.vocabulary.terms()) {
    out += t;
    out += '\n';
  }
  out += "documents " + std::to_string(corpus.docs.size()) + '\n';
  for (const auto& d : corpus.docs) {
    out += d.doc_id;
    out += '\t';
    out += d.month.str();
    out += '\t';
    out += std::to_string(d.tokens.size());
    out += '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(d.tokens[i]);
    }
    out += '\n';
  }
  return out;
}

TokenizedCorpus parse_tokenized(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kParse, "tokenized corpus: " + what);
  };
  auto expect_count = [&](std::string_view key) -> std::size_t {
    if (!std::getline(in, line)) fail("truncated before '" + std::string(key) + "'");
    const auto parts = split(line, ' ');
    if (parts.size() != 2 || parts[0] != key) fail("expected '" + std::string(key) + " <n>'");
    return static_cast<std::size_t>(parse_int(parts[1], key));
  };

  if (!std::getline(in, line) || line != kTokensMagic) fail("bad header");
  const std::size_t min_count = expect_count("min_count");
  const std::size_t v = expect_count("vocabulary");
  std::vector<std::string> terms;
  terms.reserve(v);
  for (std::size_t i = 0; i < v; ++i) {
    if (!std::getline(in, line)) fail("truncated vocabulary");
    terms.push_back(line);
  }
  TokenizedCorpus out{Vocabulary(std::move(terms), min_count), {}};
  const std::size_t d = expect_count("documents");
  out.docs.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::getline(in, line)) fail("truncated documents");
    const auto cols = split(line, '\t');
    if (cols.size() != 4) fail("document line " + std::to_string(i + 1) + " needs 4 columns");
    TokenizedDoc doc;
    doc.doc_id = cols[0];
    const auto month = YearMonth::parse(cols[1]);
    if (!month) fail("bad month '" + cols[1] + "'");
    doc.month = *month;
    const auto n = static_cast<std::size_t>(parse_int(cols[2], "token count"));
    if (n > 0) {
      for (const auto& tok : split(cols[3], ' ')) {
        const auto id = parse_int(tok, "token id");
        if (id < 0 || static_cast<std::size_t>(id) >= v) fail("token id out of range");
        doc.tokens.push_back(static_cast<TermId>(id));
      }
    }
    if (doc.tokens.size() != n) fail("token count mismatch for '" + doc.doc_id + "'");
    out.docs.push_back(std::move(doc));
  }
  return out;
}

}  // namespace coauth
