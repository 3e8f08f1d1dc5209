#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace seqlab {

// Bidirectional token <-> id map. Ids 0..3 are reserved control tokens and
// are never reassigned; content tokens follow in first-occurrence order.
class Vocabulary {
public:
  static constexpr int kPad = 0;
  static constexpr int kStart = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kReservedCount = 4;

  Vocabulary();

  // Vocabulary whose content tokens are exactly `tokens`, in order.
  static Vocabulary with_tokens(const std::vector<std::string>& tokens);

  // Returns the existing id or inserts the token at the end.
  int add(const std::string& token);

  // Id of a known token, or kUnk.
  int id_or_unk(const std::string& token) const;

  bool contains(const std::string& token) const;

  const std::string& token(int id) const;

  int size() const { return static_cast<int>(tokens_.size()); }

  // All tokens in id order, including the reserved ones.
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace seqlab
