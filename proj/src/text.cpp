#include "senselab/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "senselab/error.hpp"
#include "senselab/hash.hpp"

namespace senselab::text {

using nlohmann::json;

namespace {

bool is_letter_byte(unsigned char c) {
  // Non-ASCII bytes are treated as letters so UTF-8 sequences stay together.
  return std::isalpha(c) || c >= 0x80;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = input.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(input[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (is_letter_byte(c)) {
      std::size_t j = i;
      while (j < n && is_letter_byte(static_cast<unsigned char>(input[j]))) ++j;
      tokens.push_back(lowercase(input.substr(i, j - i)));
      i = j;
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(input[j]))) ++j;
      tokens.push_back(kNum);
      i = j;
    } else {
      tokens.push_back(std::string(1, input[i]));
      ++i;
    }
  }
  return tokens;
}

void SenseSample::validate() const {
  if (abbrev_pos < 0 || abbrev_pos >= static_cast<int>(tokens.size())) {
    throw SchemaError("sample: abbrev_pos " + std::to_string(abbrev_pos) +
                      " out of range for " + std::to_string(tokens.size()) +
                      " tokens");
  }
  if (tokens[static_cast<std::size_t>(abbrev_pos)] != lowercase(term)) {
    throw SchemaError("sample: token at abbrev_pos is '" +
                      tokens[static_cast<std::size_t>(abbrev_pos)] +
                      "', expected '" + lowercase(term) + "'");
  }
  if (sense_id < 0) throw SchemaError("sample: negative sense_id");
}

void TermSenseDictionary::add_term(
    const std::string& term, const std::vector<std::string>& sense_phrases) {
  std::set<std::string> seen;
  for (const auto& p : sense_phrases) {
    if (!seen.insert(p).second) {
      throw DataError("dictionary: duplicate sense phrase '" + p +
                      "' under term '" + term + "'");
    }
  }
  senses_[term] = sense_phrases;
}

bool TermSenseDictionary::has_term(const std::string& term) const {
  return senses_.count(term) > 0;
}

const std::vector<std::string>& TermSenseDictionary::senses(
    const std::string& term) const {
  auto it = senses_.find(term);
  if (it == senses_.end()) {
    throw DataError("dictionary: unknown term '" + term + "'");
  }
  return it->second;
}

std::vector<std::string> TermSenseDictionary::terms() const {
  std::vector<std::string> out;
  out.reserve(senses_.size());
  for (const auto& [term, _] : senses_) out.push_back(term);
  return out;
}

std::string TermSenseDictionary::to_json_string() const {
  json j = json::object();
  for (const auto& [term, phrases] : senses_) j[term] = phrases;
  return j.dump(2) + "\n";
}

TermSenseDictionary TermSenseDictionary::from_json_string(
    const std::string& body) {
  json j = json::parse(body);
  TermSenseDictionary dict;
  for (auto it = j.begin(); it != j.end(); ++it) {
    dict.add_term(it.key(), it.value().get<std::vector<std::string>>());
  }
  return dict;
}

void TermSenseDictionary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("dictionary: cannot write " + path);
  out << to_json_string();
}

TermSenseDictionary TermSenseDictionary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dictionary: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

Vocabulary::Vocabulary() {
  for (const std::string& t : {kPad, kUnk, kBos, kEos}) {
    ids_[t] = static_cast<int>(tokens_.size());
    tokens_.push_back(t);
    counts_.push_back(0);
  }
}

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) {
    counts_[static_cast<std::size_t>(it->second)] += 1;
    return it->second;
  }
  const int id = static_cast<int>(tokens_.size());
  ids_[token] = id;
  tokens_.push_back(token);
  counts_.push_back(1);
  return id;
}

int Vocabulary::id_or_unk(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? 1 : it->second;
}

std::optional<int> Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw ContractError("vocabulary: id " + std::to_string(id) +
                        " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::int64_t Vocabulary::count(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? 0 : counts_[static_cast<std::size_t>(it->second)];
}

Vocabulary Vocabulary::build(
    const std::vector<std::vector<std::string>>& corpus,
    std::int64_t min_count) {
  std::map<std::string, std::int64_t> freq;
  for (const auto& sent : corpus) {
    for (const auto& tok : sent) freq[tok] += 1;
  }
  // Deterministic id order: frequency descending, then token ascending.
  std::vector<std::pair<std::string, std::int64_t>> entries(freq.begin(),
                                                            freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary vocab;
  for (const auto& [tok, cnt] : entries) {
    if (cnt < min_count) continue;
    const int id = vocab.add(tok);
    vocab.counts_[static_cast<std::size_t>(id)] = cnt;
  }
  return vocab;
}

std::uint64_t Vocabulary::content_hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    h = fnv1a64(tokens_[i], h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(std::to_string(counts_[i]), h);
    h = fnv1a64("\n", h);
  }
  return h;
}

std::string Vocabulary::to_json_string() const {
  json j;
  j["tokens"] = tokens_;
  j["counts"] = counts_;
  return j.dump() + "\n";
}

Vocabulary Vocabulary::from_json_string(const std::string& body) {
  json j = json::parse(body);
  auto tokens = j.at("tokens").get<std::vector<std::string>>();
  auto counts = j.at("counts").get<std::vector<std::int64_t>>();
  if (tokens.size() != counts.size() || tokens.size() < 4) {
    throw SchemaError("vocabulary: tokens/counts shape mismatch");
  }
  Vocabulary vocab;
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    const int id = vocab.add(tokens[i]);
    vocab.counts_[static_cast<std::size_t>(id)] = counts[i];
  }
  return vocab;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("vocabulary: cannot write " + path);
  out << to_json_string();
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("vocabulary: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

std::vector<SenseSample> replace_sense_mentions(
    const std::vector<std::string>& sentences,
    const TermSenseDictionary& dict) {
  if (dict.empty()) throw DataError("replace_sense_mentions: empty dictionary");

  // Pre-tokenize every phrase once. Ordered by (term, sense) for stable
  // tie-breaking between equally long matches.
  struct Entry {
    std::string term;
    int sense_id;
    std::string phrase;
    std::vector<std::string> phrase_tokens;
  };
  std::vector<Entry> entries;
  for (const std::string& term : dict.terms()) {
    const auto& phrases = dict.senses(term);
    for (std::size_t s = 0; s < phrases.size(); ++s) {
      auto toks = tokenize(phrases[s]);
      if (toks.empty()) continue;
      entries.push_back(
          {term, static_cast<int>(s), phrases[s], std::move(toks)});
    }
  }

  std::vector<SenseSample> out;
  for (const std::string& sentence : sentences) {
    const auto tokens = tokenize(sentence);
    const Entry* hit = nullptr;
    std::size_t hit_pos = 0;
    for (std::size_t pos = 0; pos < tokens.size() && !hit; ++pos) {
      // Longest phrase starting here wins; entry order breaks exact ties.
      const Entry* best = nullptr;
      for (const Entry& e : entries) {
        const std::size_t len = e.phrase_tokens.size();
        if (pos + len > tokens.size()) continue;
        if (!std::equal(e.phrase_tokens.begin(), e.phrase_tokens.end(),
                        tokens.begin() + static_cast<std::ptrdiff_t>(pos))) {
          continue;
        }
        if (best == nullptr || len > best->phrase_tokens.size()) best = &e;
      }
      if (best) {
        hit = best;
        hit_pos = pos;
      }
    }
    if (!hit) continue;
    SenseSample sample;
    sample.term = hit->term;
    sample.sense_id = hit->sense_id;
    sample.sense_phrase = hit->phrase;
    sample.tokens.assign(tokens.begin(),
                         tokens.begin() + static_cast<std::ptrdiff_t>(hit_pos));
    sample.tokens.push_back(lowercase(hit->term));
    sample.tokens.insert(
        sample.tokens.end(),
        tokens.begin() +
            static_cast<std::ptrdiff_t>(hit_pos + hit->phrase_tokens.size()),
        tokens.end());
    sample.abbrev_pos = static_cast<int>(hit_pos);
    sample.source = "replaced";
    sample.validate();
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<int> default_train_schedule(int senses_per_term) {
  std::vector<int> schedule;
  double count = 60.0;
  for (int s = 0; s < senses_per_term; ++s) {
    schedule.push_back(std::max(1, static_cast<int>(count + 0.5)));
    count /= 4.0;
  }
  // Guarantee a rare sense when there are at least two classes.
  if (senses_per_term >= 2 && schedule.back() > 5) schedule.back() = 5;
  return schedule;
}

namespace {

// Pronounceable unique lowercase words, 2-3 consonant-vowel syllables.
class WordMinter {
 public:
  explicit WordMinter(Rng* rng) : rng_(rng) {}

  std::string mint() {
    static const std::string consonants = "bcdfghjklmnpqrstvwz";
    static const std::string vowels = "aeiou";
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const int syllables = 2 + rng_->uniform_int(2);
      std::string w;
      for (int s = 0; s < syllables; ++s) {
        w += consonants[static_cast<std::size_t>(
            rng_->uniform_int(static_cast<int>(consonants.size())))];
        w += vowels[static_cast<std::size_t>(
            rng_->uniform_int(static_cast<int>(vowels.size())))];
      }
      if (seen_.insert(w).second) return w;
    }
    throw ConfigError("synthetic generator: word space exhausted");
  }

  void reserve(const std::string& w) { seen_.insert(w); }

 private:
  Rng* rng_;
  std::set<std::string> seen_;
};

}  // namespace

SyntheticDataset generate_synthetic_benchmark(const SyntheticConfig& cfg) {
  if (cfg.n_terms < 1 || cfg.senses_per_term < 2) {
    throw ConfigError("synthetic generator: need >= 1 term and >= 2 senses");
  }
  if (cfg.mixture_weight < 0.0 || cfg.mixture_weight > 1.0) {
    throw ConfigError("synthetic generator: mixture_weight outside [0, 1]");
  }
  if (cfg.min_len < 1 || cfg.max_len < cfg.min_len) {
    throw ConfigError("synthetic generator: bad sentence length range");
  }
  const int n_topics = cfg.n_terms * cfg.senses_per_term;
  const int words_needed =
      n_topics * cfg.topic_vocab_size + cfg.background_vocab_size;
  if (words_needed > cfg.vocab_budget) {
    throw ConfigError(
        "synthetic generator: vocab budget " + std::to_string(cfg.vocab_budget) +
        " too small for " + std::to_string(words_needed) +
        " disjoint topic/background words");
  }
  std::vector<int> schedule = cfg.train_schedule.empty()
                                  ? default_train_schedule(cfg.senses_per_term)
                                  : cfg.train_schedule;
  if (static_cast<int>(schedule.size()) != cfg.senses_per_term) {
    throw ConfigError("synthetic generator: train_schedule length " +
                      std::to_string(schedule.size()) + " != senses_per_term " +
                      std::to_string(cfg.senses_per_term));
  }

  Rng root(cfg.seed);
  Rng vocab_rng = root.substream("gen/vocab");
  WordMinter minter(&vocab_rng);

  SyntheticDataset ds;

  // Two-letter abbreviation terms; reserved in the minter, and shorter than
  // any minted word anyway.
  static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  std::set<std::string> used_terms;
  for (int t = 0; t < cfg.n_terms; ++t) {
    std::string term;
    do {
      term = std::string() +
             letters[static_cast<std::size_t>(vocab_rng.uniform_int(26))] +
             letters[static_cast<std::size_t>(vocab_rng.uniform_int(26))];
    } while (!used_terms.insert(term).second);
    minter.reserve(term);
    std::string upper = term;
    for (char& c : upper) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    ds.terms.push_back(upper);
  }

  for (int t = 0; t < cfg.n_terms; ++t) {
    std::vector<std::string> phrases;
    for (int s = 0; s < cfg.senses_per_term; ++s) {
      std::vector<std::string> topic_words;
      topic_words.reserve(static_cast<std::size_t>(cfg.topic_vocab_size));
      for (int w = 0; w < cfg.topic_vocab_size; ++w) {
        topic_words.push_back(minter.mint());
      }
      phrases.push_back(topic_words[0] + " " + topic_words[1]);
      ds.topic_vocabs.push_back(std::move(topic_words));
    }
    ds.dict.add_term(ds.terms[static_cast<std::size_t>(t)], phrases);
  }
  for (int w = 0; w < cfg.background_vocab_size; ++w) {
    ds.background_vocab.push_back(minter.mint());
  }

  auto draw_sentence = [&](Rng& rng, int term_idx, int sense_idx) {
    const auto& topic = ds.topic_vocabs[static_cast<std::size_t>(
        term_idx * cfg.senses_per_term + sense_idx)];
    const int len =
        cfg.min_len + rng.uniform_int(cfg.max_len - cfg.min_len + 1);
    SenseSample sample;
    sample.term = ds.terms[static_cast<std::size_t>(term_idx)];
    sample.sense_id = sense_idx;
    sample.sense_phrase =
        ds.dict.senses(sample.term)[static_cast<std::size_t>(sense_idx)];
    sample.source = "synthetic";
    for (int i = 0; i < len; ++i) {
      if (rng.uniform() < cfg.mixture_weight) {
        sample.tokens.push_back(topic[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(topic.size())))]);
      } else {
        sample.tokens.push_back(ds.background_vocab[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(ds.background_vocab.size())))]);
      }
    }
    sample.abbrev_pos = rng.uniform_int(len + 1);
    std::string abbrev = sample.term;
    for (char& c : abbrev) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    sample.tokens.insert(sample.tokens.begin() + sample.abbrev_pos, abbrev);
    sample.validate();
    return sample;
  };

  for (int t = 0; t < cfg.n_terms; ++t) {
    Rng term_rng = root.substream("gen/term/" + std::to_string(t));
    for (int s = 0; s < cfg.senses_per_term; ++s) {
      for (int i = 0; i < schedule[static_cast<std::size_t>(s)]; ++i) {
        ds.train.push_back(draw_sentence(term_rng, t, s));
      }
      for (int i = 0; i < cfg.samples_per_sense_test; ++i) {
        ds.test.push_back(draw_sentence(term_rng, t, s));
      }
    }
  }
  return ds;
}

void write_jsonl(const std::string& path,
                 const std::vector<SenseSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_jsonl: cannot write " + path);
  for (const SenseSample& s : samples) {
    json j;
    j["term"] = s.term;
    j["sense_id"] = s.sense_id;
    j["sense_phrase"] = s.sense_phrase;
    j["tokens"] = s.tokens;
    j["abbrev_pos"] = s.abbrev_pos;
    j["source"] = s.source;
    out << j.dump() << "\n";
  }
}

std::vector<SenseSample> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("read_jsonl: cannot read " + path);
  std::vector<SenseSample> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    SenseSample s;
    for (const char* field : {"term", "sense_id", "sense_phrase", "tokens",
                              "abbrev_pos", "source"}) {
      if (!j.contains(field)) {
        throw SchemaError(path + ":" + std::to_string(line_no) +
                          ": missing field '" + field + "'");
      }
    }
    try {
      s.term = j["term"].get<std::string>();
      s.sense_id = j["sense_id"].get<int>();
      s.sense_phrase = j["sense_phrase"].get<std::string>();
      s.tokens = j["tokens"].get<std::vector<std::string>>();
      s.abbrev_pos = j["abbrev_pos"].get<int>();
      s.source = j["source"].get<std::string>();
    } catch (const json::exception& e) {
      throw SchemaError(path + ":" + std::to_string(line_no) +
                        ": bad field type: " + e.what());
    }
    try {
      s.validate();
    } catch (const SchemaError& e) {
      throw SchemaError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<std::string>> corpus_tokens(
    const std::vector<SenseSample>& samples) {
  std::vector<std::vector<std::string>> out;
  out.reserve(samples.size());
  for (const SenseSample& s : samples) out.push_back(s.tokens);
  return out;
}

}  // namespace senselab::text
