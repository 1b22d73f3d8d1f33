#include "coauth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coauth/error.hpp"
#include "coauth/io.hpp"
#include "coauth/rng.hpp"

namespace coauth {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprtvz";
constexpr std::string_view kVowels = "aeiou";

struct Identity {
  std::string first;
  char middle = 0;  // 0 = no middle initial
  std::string last;
};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

std::string render_name(const Identity& who, Rng& rng, double variant_rate) {
  const std::string first = capitalize(who.first);
  const std::string last = capitalize(who.last);
  const std::string middle = who.middle ? std::string(1, who.middle) + ". " : std::string();
  if (variant_rate > 0.0 && rng.uniform() < variant_rate) {
    switch (rng.below(3)) {
      case 0: return first.substr(0, 1) + ". " + middle + last;
      case 1: return first + " " + last;
      default: return first.substr(0, 1) + ". " + last;
    }
  }
  return first + " " + middle + last;
}

// Inverse-CDF draw from cumulative weights.
std::size_t draw(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

struct TextModel {
  std::vector<std::string> terms;
  std::vector<std::vector<double>> cumulative;  // per topic, over that topic's terms
};

TextModel make_text_model(const SynthSpec& spec, Matrix* planted_phi) {
  TextModel tm;
  const std::size_t v = spec.topics * spec.vocab_per_topic;
  tm.terms.reserve(v);
  // The multiplier is coprime to 65^4, so distinct g give distinct words.
  for (std::size_t g = 0; g < v; ++g) tm.terms.push_back(pseudo_word((g + 1) * 1'234'567 % 17'850'625, 4));
  std::vector<double> weights(spec.vocab_per_topic);
  double total = 0.0;
  for (std::size_t r = 0; r < spec.vocab_per_topic; ++r) {
    weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), spec.zipf_exponent);
    total += weights[r];
  }
  std::vector<double> cum(spec.vocab_per_topic);
  std::partial_sum(weights.begin(), weights.end(), cum.begin());
  tm.cumulative.assign(spec.topics, cum);
  if (planted_phi) {
    *planted_phi = Matrix(spec.topics, v, 0.0);
    for (std::size_t t = 0; t < spec.topics; ++t)
      for (std::size_t r = 0; r < spec.vocab_per_topic; ++r)
        (*planted_phi)(t, t * spec.vocab_per_topic + r) = weights[r] / total;
  }
  return tm;
}

std::string make_words(const SynthSpec& spec, const TextModel& tm, std::size_t primary, double purity,
                       std::size_t count, Rng& rng) {
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t topic = primary;
    if (spec.topics > 1 && rng.uniform() >= purity) {
      topic = static_cast<std::size_t>(rng.below(spec.topics - 1));
      if (topic >= primary) ++topic;
    }
    const std::size_t r = draw(tm.cumulative[topic], rng);
    if (!out.empty()) out += ' ';
    if (rng.uniform() < 0.15) out += "the ";
    out += tm.terms[topic * spec.vocab_per_topic + r];
  }
  return out;
}

struct Draft {
  int month;
  std::size_t topic;
  std::size_t seq;
  Document doc;
};

}  // namespace

std::string pseudo_word(std::uint64_t index, std::size_t syllables) {
  const std::uint64_t base = kConsonants.size() * kVowels.size();
  std::string out;
  for (std::size_t s = 0; s < syllables; ++s) {
    const std::uint64_t syl = index % base;
    index /= base;
    out += kConsonants[syl / kVowels.size()];
    out += kVowels[syl % kVowels.size()];
  }
  return out;
}

void SynthSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kConfig, "synth: " + what); };
  if (topics < 1) bad("topics must be >= 1");
  if (vocab_per_topic < 1) bad("vocab_per_topic must be >= 1");
  if (docs_per_topic < 1) bad("docs_per_topic must be >= 1");
  if (title_words + abstract_words < 1) bad("documents need at least one word");
  if (!(purity > 0.0 && purity <= 1.0)) bad("purity must lie in (0,1]");
  if (months < 1) bad("months must be >= 1");
  if (min_authors < 1 || max_authors < min_authors) bad("author count range is empty");
  for (double m : mixing)
    if (!(m >= 0.0 && m <= 1.0)) bad("mixing rates must lie in [0,1]");
  if (!(name_variant_rate >= 0.0 && name_variant_rate <= 1.0)) bad("name_variant_rate must lie in [0,1]");
  if (topics * vocab_per_topic > 1'000'000) bad("vocabulary too large");
}

double SynthSpec::mixing_for(std::size_t topic) const {
  if (mixing.empty()) return 0.0;
  return mixing[std::min(topic, mixing.size() - 1)];
}

SyntheticCorpus generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  SyntheticCorpus out;
  const TextModel tm = make_text_model(spec, &out.planted_phi);
  out.terms = tm.terms;

  std::vector<Draft> drafts;
  drafts.reserve(spec.topics * spec.docs_per_topic);
  std::size_t identity_counter = 0;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    std::vector<int> months(spec.docs_per_topic);
    for (auto& m : months) m = static_cast<int>(rng.below(spec.months));
    std::sort(months.begin(), months.end());

    std::vector<Identity> pool;
    const double mixing = spec.mixing_for(t);
    for (std::size_t a = 0; a < spec.docs_per_topic; ++a) {
      const double ramp = spec.months > 1 ? static_cast<double>(months[a]) / static_cast<double>(spec.months - 1) : 1.0;
      const double reuse = mixing * ramp;
      const std::size_t team = spec.min_authors + static_cast<std::size_t>(rng.below(spec.max_authors - spec.min_authors + 1));
      std::vector<std::size_t> members;
      for (std::size_t s = 0; s < team; ++s) {
        std::size_t who = pool.size();
        if (pool.size() > members.size() && rng.uniform() < reuse) {
          do {
            who = static_cast<std::size_t>(rng.below(pool.size()));
          } while (std::find(members.begin(), members.end(), who) != members.end());
        } else {
          Identity id;
          id.first = pseudo_word(rng.below(4225), 2);
          id.middle = rng.uniform() < 0.7 ? static_cast<char>('A' + rng.below(26)) : 0;
          id.last = pseudo_word(identity_counter++ * 104'729 % 17'850'625, 4);
          pool.push_back(std::move(id));
        }
        members.push_back(who);
      }

      Draft d{months[a], t, a, {}};
      for (std::size_t who : members) d.doc.authors.push_back(render_name(pool[who], rng, spec.name_variant_rate));
      d.doc.title = capitalize(make_words(spec, tm, t, spec.purity, spec.title_words, rng));
      d.doc.abstract = capitalize(make_words(spec, tm, t, spec.purity, spec.abstract_words, rng)) + ".";
      d.doc.month = spec.start.plus_months(months[a]);
      drafts.push_back(std::move(d));
    }
  }

  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    if (a.month != b.month) return a.month < b.month;
    if (a.topic != b.topic) return a.topic < b.topic;
    return a.seq < b.seq;
  });
  out.documents.reserve(drafts.size());
  out.primary_topic.reserve(drafts.size());
  char id[32];
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    std::snprintf(id, sizeof id, "synth/%06zu", i);
    drafts[i].doc.doc_id = id;
    out.documents.push_back(std::move(drafts[i].doc));
    out.primary_topic.push_back(drafts[i].topic);
  }
  return out;
}

std::vector<Document> generate_single_topic_docs(const SynthSpec& spec, const SyntheticCorpus& planted,
                                                 std::size_t topic, std::size_t count, std::uint64_t seed) {
  spec.validate();
  if (topic >= spec.topics) throw Error(ErrorCode::kConfig, "synth: topic out of range");
  Rng rng(seed);
  TextModel tm = make_text_model(spec, nullptr);
  tm.terms = planted.terms;
  std::vector<Document> docs;
  char id[48];
  for (std::size_t i = 0; i < count; ++i) {
    Document d;
    std::snprintf(id, sizeof id, "heldout/%zu/%04zu", topic, i);
    d.doc_id = id;
    d.title = capitalize(make_words(spec, tm, topic, 1.0, spec.title_words, rng));
    d.abstract = capitalize(make_words(spec, tm, topic, 1.0, spec.abstract_words, rng)) + ".";
    d.authors.push_back("Held " + capitalize(pseudo_word(i + 1, 3)));
    d.month = spec.start;
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string serialize_truth(const SyntheticCorpus& corpus) {
  std::string out = "doc_id\ttopic\n";
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    out += corpus.documents[i].doc_id + '\t' + std::to_string(corpus.primary_topic[i]) + '\n';
  return out;
}

std::string serialize_planted_phi(const SyntheticCorpus& corpus) {
  std::string out = "topic\tterm\tprobability\n";
  for (std::size_t t = 0; t < corpus.planted_phi.rows(); ++t) {
    for (std::size_t w = 0; w < corpus.planted_phi.cols(); ++w) {
      const double p = corpus.planted_phi(t, w);
      if (p > 0.0) out += std::to_string(t) + '\t' + corpus.terms[w] + '\t' + format_double(p) + '\n';
    }
  }
  return out;
}

SynthSpec synth_spec_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  SynthSpec s;
  auto as_size = [](const std::string& v, const std::string& k) {
    const auto x = parse_int(v, k);
    if (x < 0) throw Error(ErrorCode::kConfig, k + " must be non-negative");
    return static_cast<std::size_t>(x);
  };
  for (const auto& [key, value] : pairs) {
    if (key.rfind("synth.", 0) != 0) continue;
    const std::string k = key.substr(6);
    if (k == "topics") s.topics = as_size(value, key);
    else if (k == "vocab_per_topic") s.vocab_per_topic = as_size(value, key);
    else if (k == "zipf_exponent") s.zipf_exponent = parse_double(value, key);
    else if (k == "docs_per_topic") s.docs_per_topic = as_size(value, key);
    else if (k == "title_words") s.title_words = as_size(value, key);
    else if (k == "abstract_words") s.abstract_words = as_size(value, key);
    else if (k == "purity") s.purity = parse_double(value, key);
    else if (k == "months") s.months = as_size(value, key);
    else if (k == "start") {
      const auto ym = YearMonth::parse(value);
      if (!ym) throw Error(ErrorCode::kConfig, "synth.start must be YYYY-MM");
      s.start = *ym;
    } else if (k == "min_authors") s.min_authors = as_size(value, key);
    else if (k == "max_authors") s.max_authors = as_size(value, key);
    else if (k == "mixing") {
      s.mixing.clear();
      for (const auto& part : split(value, ',')) s.mixing.push_back(parse_double(part, key));
    } else if (k == "name_variant_rate") s.name_variant_rate = parse_double(value, key);
    else throw Error(ErrorCode::kConfig, "unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

}  // namespace coauth
