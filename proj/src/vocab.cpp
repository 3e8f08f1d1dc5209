#include "seqlab/vocab.hpp"

#include "seqlab/error.hpp"

namespace seqlab {

Vocabulary::Vocabulary() {
  tokens_ = {"_PAD_", "_START_", "_EOS_", "_UNK_"};
  for (int i = 0; i < kReservedCount; ++i) ids_[tokens_[i]] = i;
}

Vocabulary Vocabulary::with_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const auto& t : tokens) v.add(t);
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

int Vocabulary::id_or_unk(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return ids_.count(token) > 0; }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size())
    throw IndexError("vocabulary: id " + std::to_string(id) + " out of range [0, " +
                     std::to_string(size()) + ")");
  return tokens_[id];
}

}  // namespace seqlab
