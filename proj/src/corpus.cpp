#include "seqlab/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "seqlab/error.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isspace(ch)) {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a')
                                           : static_cast<char>(ch));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<int> encode_tokens(const std::vector<std::string>& tokens, VocabPolicy policy,
                               Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens)
    ids.push_back(policy == VocabPolicy::build ? vocab.add(t) : vocab.id_or_unk(t));
  return ids;
}

std::vector<std::string> decode_tokens(const std::vector<int>& ids, const Vocabulary& vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(vocab.token(id));
  return tokens;
}

Corpus parse_corpus(const std::string& text, VocabPolicy policy, Vocabulary& vocab) {
  Corpus corpus;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw CorpusError("line " + std::to_string(line_no) +
                        ": expected exactly one tab separating message and response");

    auto msg_tokens = tokenize(line.substr(0, tab));
    auto resp_tokens = tokenize(line.substr(tab + 1));
    if (msg_tokens.empty())
      throw CorpusError("line " + std::to_string(line_no) + ": empty message field");
    if (resp_tokens.empty())
      throw CorpusError("line " + std::to_string(line_no) + ": empty response field");

    DialoguePair pair;
    pair.message = encode_tokens(msg_tokens, policy, vocab);
    pair.response = encode_tokens(resp_tokens, policy, vocab);
    pair.response.push_back(Vocabulary::kEos);
    corpus.pairs.push_back(std::move(pair));
  }
  if (corpus.empty()) throw CorpusError("empty corpus: no message-response pairs");
  return corpus;
}

Corpus load_corpus(const std::string& path, VocabPolicy policy, Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), policy, vocab);
}

Corpus reverse_pairs(const Corpus& corpus) {
  Corpus reversed;
  reversed.pairs.reserve(corpus.size());
  for (const auto& pair : corpus.pairs) {
    if (pair.response.empty() || pair.response.back() != Vocabulary::kEos)
      throw CorpusError("reverse_pairs: response not terminated by _EOS_");
    DialoguePair swapped;
    swapped.message.assign(pair.response.begin(), pair.response.end() - 1);
    swapped.response = pair.message;
    swapped.response.push_back(Vocabulary::kEos);
    reversed.pairs.push_back(std::move(swapped));
  }
  return reversed;
}

void SyntheticCorpusSpec::validate() const {
  if (base_vocab_size < 1)
    throw ConfigError("synthetic corpus: base_vocab_size must be >= 1");
  if (num_templates < 1) throw ConfigError("synthetic corpus: num_templates must be >= 1");
  if (!(generic_skew >= 0.0) || generic_skew >= 1.0)
    throw ConfigError("synthetic corpus: generic_skew must be in [0, 1)");
  if (num_generic < 1) throw ConfigError("synthetic corpus: num_generic must be >= 1");
  if (num_generic > 4)
    throw ConfigError("synthetic corpus: at most 4 generic responses are available");
}

namespace {

// Deterministic content-word pool; extended with numbered words when a spec
// asks for more than the canned list.
const char* kPool[] = {
    "time",   "people", "way",    "day",    "thing", "world",  "life",  "hand",
    "part",   "child",  "eye",    "woman",  "place", "work",   "week",  "case",
    "point",  "company", "number", "group",  "problem", "fact", "water", "room",
    "money",  "story",  "month",  "book",   "word",  "house",  "friend", "father",
    "power",  "hour",   "game",   "line",   "city",  "name",   "team",  "minute"};

std::vector<std::string> word_pool(int size) {
  std::vector<std::string> pool;
  pool.reserve(size);
  const int canned = static_cast<int>(sizeof(kPool) / sizeof(kPool[0]));
  for (int i = 0; i < size; ++i) {
    if (i < canned)
      pool.emplace_back(kPool[i]);
    else
      pool.push_back("item" + std::to_string(i - canned));
  }
  return pool;
}

const std::vector<std::string>& canned_generic() {
  static const std::vector<std::string> responses = {
      "i do not know",
      "i am not sure",
      "i can not say",
      "i have no idea",
  };
  return responses;
}

// Unique per-template suffix: single pool word below the pool size, a word
// pair beyond it. Injective for num_templates < pool^2.
std::vector<std::string> anchors(int i, const std::vector<std::string>& pool) {
  const int v = static_cast<int>(pool.size());
  if (i < v) return {pool[i]};
  return {pool[i % v], pool[(i / v) % v]};
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) s += ' ';
    s += words[i];
  }
  return s;
}

}  // namespace

std::vector<std::string> generic_responses(const SyntheticCorpusSpec& spec) {
  spec.validate();
  const auto& all = canned_generic();
  return {all.begin(), all.begin() + spec.num_generic};
}

std::vector<std::pair<std::string, std::string>> generate_synthetic_text(
    const SyntheticCorpusSpec& spec, int size) {
  spec.validate();
  if (size < 1) throw ConfigError("synthetic corpus: size must be >= 1");

  const auto pool = word_pool(spec.base_vocab_size);
  Rng rng(spec.seed);

  std::vector<std::string> messages(spec.num_templates);
  std::vector<std::string> specific(spec.num_templates);
  for (int i = 0; i < spec.num_templates; ++i) {
    auto suffix = anchors(i, pool);
    std::vector<std::string> msg = {pool[rng.index(pool.size())], pool[rng.index(pool.size())]};
    msg.insert(msg.end(), suffix.begin(), suffix.end());
    std::vector<std::string> resp = {pool[rng.index(pool.size())], pool[rng.index(pool.size())]};
    resp.insert(resp.end(), suffix.begin(), suffix.end());
    messages[i] = join(msg);
    specific[i] = join(resp);
  }

  const auto generic = generic_responses(spec);
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(size);
  for (int n = 0; n < size; ++n) {
    const int t = static_cast<int>(rng.index(messages.size()));
    if (rng.uniform() < spec.generic_skew) {
      pairs.emplace_back(messages[t], generic[rng.index(generic.size())]);
    } else {
      pairs.emplace_back(messages[t], specific[t]);
    }
  }
  return pairs;
}

Corpus generate_synthetic(const SyntheticCorpusSpec& spec, int size, Vocabulary& vocab) {
  return parse_corpus(to_tsv(generate_synthetic_text(spec, size)), VocabPolicy::build, vocab);
}

std::string to_tsv(const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::string out;
  for (const auto& [msg, resp] : pairs) {
    out += msg;
    out += '\t';
    out += resp;
    out += '\n';
  }
  return out;
}

}  // namespace seqlab
