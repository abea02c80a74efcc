#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "senselab/rng.hpp"

namespace senselab::text {

// Reserved vocabulary entries, ids 0..3 in this order.
inline const std::string kPad = "<pad>";
inline const std::string kUnk = "<unk>";
inline const std::string kBos = "<bos>";
inline const std::string kEos = "<eos>";
// Digit runs collapse to this token.
inline const std::string kNum = "NUM";

// Lowercases, splits on whitespace and punctuation boundaries (punctuation
// kept as single-character tokens), and folds digit runs into NUM.
std::vector<std::string> tokenize(std::string_view input);

// One labeled sentence for one abbreviation term.
struct SenseSample {
  std::string term;
  int sense_id = 0;
  std::string sense_phrase;
  std::vector<std::string> tokens;
  int abbrev_pos = 0;
  std::string source;  // synthetic | replaced | manual

  bool operator==(const SenseSample&) const = default;

  // Enforces the position/label invariants; throws SchemaError.
  void validate() const;
};

// term -> ordered sense phrases; the serialized order defines sense_id.
class TermSenseDictionary {
 public:
  void add_term(const std::string& term,
                const std::vector<std::string>& sense_phrases);
  bool has_term(const std::string& term) const;
  const std::vector<std::string>& senses(const std::string& term) const;
  std::vector<std::string> terms() const;  // sorted
  int n_terms() const { return static_cast<int>(senses_.size()); }
  bool empty() const { return senses_.empty(); }

  std::string to_json_string() const;
  static TermSenseDictionary from_json_string(const std::string& body);
  void save(const std::string& path) const;
  static TermSenseDictionary load(const std::string& path);

 private:
  std::map<std::string, std::vector<std::string>> senses_;
};

class Vocabulary {
 public:
  Vocabulary();

  // Inserts if unseen and bumps the frequency count; returns the id.
  int add(const std::string& token);
  int id_or_unk(const std::string& token) const;
  std::optional<int> id(const std::string& token) const;
  const std::string& token(int id) const;
  std::int64_t count(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                          std::int64_t min_count = 1);

  std::uint64_t content_hash() const;
  std::string to_json_string() const;
  static Vocabulary from_json_string(const std::string& body);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
};

// Scans sentences for sense-phrase mentions (case-insensitive, token
// boundaries) and replaces the first, longest match with the abbreviation
// token. Sentences without a match produce nothing.
std::vector<SenseSample> replace_sense_mentions(
    const std::vector<std::string>& sentences, const TermSenseDictionary& dict);

struct SyntheticConfig {
  int n_terms = 10;
  int senses_per_term = 3;
  int topic_vocab_size = 16;       // content words owned by each sense topic
  int background_vocab_size = 80;  // shared filler words
  // Per-sense training sample counts, head class first. Empty -> a long-tail
  // schedule is derived (geometric decay down to a rare sense).
  std::vector<int> train_schedule;
  int samples_per_sense_test = 15;
  double mixture_weight = 0.6;  // probability a content slot is a topic word
  int min_len = 8;
  int max_len = 14;
  int vocab_budget = 4000;  // distinct content words available
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  std::vector<SenseSample> train;
  std::vector<SenseSample> test;
  TermSenseDictionary dict;
  // Gold latent-topic vocabularies, indexed term_idx * senses_per_term +
  // sense_idx; used by topic-recovery checks.
  std::vector<std::vector<std::string>> topic_vocabs;
  std::vector<std::string> background_vocab;
  std::vector<std::string> terms;  // generation order
};

SyntheticDataset generate_synthetic_benchmark(const SyntheticConfig& cfg);

// Derived long-tail schedule used when SyntheticConfig.train_schedule is
// empty: head count decays geometrically, tail clamped to a rare sense.
std::vector<int> default_train_schedule(int senses_per_term);

// JSONL dataset files, one sample object per line.
void write_jsonl(const std::string& path,
                 const std::vector<SenseSample>& samples);
std::vector<SenseSample> read_jsonl(const std::string& path);

// Token lists of every sample; the unlabeled corpus view used for
// pre-training stages.
std::vector<std::vector<std::string>> corpus_tokens(
    const std::vector<SenseSample>& samples);

}  // namespace senselab::text
