#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqlab/vocab.hpp"

namespace seqlab {

// One message/response training pair. The response always ends in exactly one
// _EOS_; the message carries none.
struct DialoguePair {
  std::vector<int> message;
  std::vector<int> response;
};

struct Corpus {
  std::vector<DialoguePair> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Lowercases and splits on whitespace runs; punctuation stays attached.
std::vector<std::string> tokenize(const std::string& text);

enum class VocabPolicy {
  build,  // unseen tokens extend the vocabulary in first-occurrence order
  fixed,  // unseen tokens map to _UNK_
};

// Reads a UTF-8 TSV of message<TAB>response lines. Responses get _EOS_
// appended. Both fields must tokenize to at least one token. Under
// VocabPolicy::build the given vocabulary is extended in place.
Corpus load_corpus(const std::string& path, VocabPolicy policy, Vocabulary& vocab);

// Same, from an already-read buffer (used by the file loader and tests).
Corpus parse_corpus(const std::string& text, VocabPolicy policy, Vocabulary& vocab);

// Swaps message and response roles: (X, Y) -> (Y minus _EOS_, X plus _EOS_).
// Applying it twice returns the original corpus.
Corpus reverse_pairs(const Corpus& corpus);

std::vector<int> encode_tokens(const std::vector<std::string>& tokens, VocabPolicy policy,
                               Vocabulary& vocab);
std::vector<std::string> decode_tokens(const std::vector<int>& ids, const Vocabulary& vocab);

// Recipe for a low-diversity synthetic corpus: a pool of message templates
// where a `generic_skew` fraction of pairs answer with one of a few canned
// generic responses and the rest answer with a response derived from the
// template. Generation is a pure function of (spec, size).
struct SyntheticCorpusSpec {
  int base_vocab_size = 30;   // distinct content words available to templates
  int num_templates = 20;     // distinct messages
  double generic_skew = 0.0;  // fraction of pairs answered generically, in [0, 1)
  int num_generic = 2;        // size of the generic response set, >= 1
  std::uint64_t seed = 0;

  void validate() const;
};

// Raw text pairs, one (message, response) per entry.
std::vector<std::pair<std::string, std::string>> generate_synthetic_text(
    const SyntheticCorpusSpec& spec, int size);

// The canned generic responses the skewed pairs draw from.
std::vector<std::string> generic_responses(const SyntheticCorpusSpec& spec);

// Convenience: generate, then build corpus + vocabulary in one go.
Corpus generate_synthetic(const SyntheticCorpusSpec& spec, int size, Vocabulary& vocab);

// Serializes text pairs as message<TAB>response lines.
std::string to_tsv(const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace seqlab
