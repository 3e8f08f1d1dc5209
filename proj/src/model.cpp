#include "seqlab/model.hpp"

#include <cmath>
#include <functional>

#include "seqlab/error.hpp"

namespace seqlab {

void ModelConfig::validate() const {
  if (vocab_size < Vocabulary::kReservedCount)
    throw ConfigError("vocab_size must be >= 4 (reserved tokens), got " +
                      std::to_string(vocab_size));
  if (embed_dim < 1 || hidden_dim < 1)
    throw ConfigError("embed_dim and hidden_dim must be positive");
  if (attention == AttentionMode::multi && heads < 2)
    throw ConfigError("multi-head attention requires at least 2 heads, got " +
                      std::to_string(heads));
  if (kind == ModelKind::decoder_only && attention != AttentionMode::none)
    throw ConfigError("decoder-only models cannot use attention");
}

namespace {

int head_count(const ModelConfig& c) {
  switch (c.attention) {
    case AttentionMode::none: return 0;
    case AttentionMode::single: return 1;
    case AttentionMode::multi: return c.heads;
  }
  return 0;
}

// 1x(a+b) from two row vectors, via the row-concat primitive.
Tape::Id concat_cols(Tape& t, Tape::Id a, Tape::Id b) {
  return t.transpose(t.concat_rows({t.transpose(a), t.transpose(b)}));
}

struct BoundCell {
  Tape::Id w_in_t, w_h_t, bias;
};

std::pair<Tape::Id, Tape::Id> lstm_step(Tape& t, const BoundCell& cell, Tape::Id x,
                                        Tape::Id h, Tape::Id c, int d) {
  Tape::Id gates = t.add(t.add(t.matmul(x, cell.w_in_t), t.matmul(h, cell.w_h_t)), cell.bias);
  Tape::Id gate_i = t.sigmoid(t.slice_cols(gates, 0, d));
  Tape::Id gate_f = t.sigmoid(t.slice_cols(gates, d, d));
  Tape::Id gate_g = t.tanh(t.slice_cols(gates, 2 * d, d));
  Tape::Id gate_o = t.sigmoid(t.slice_cols(gates, 3 * d, d));
  Tape::Id c_next = t.add(t.mul(gate_f, c), t.mul(gate_i, gate_g));
  Tape::Id h_next = t.mul(gate_o, t.tanh(c_next));
  return {h_next, c_next};
}

}  // namespace

Seq2SeqModel::Seq2SeqModel(ModelConfig config, Vocabulary vocab, Rng& rng)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  if (config_.vocab_size != vocab_.size())
    throw ConfigError("vocab_size " + std::to_string(config_.vocab_size) +
                      " does not match vocabulary of " + std::to_string(vocab_.size()));
  register_params(rng);
}

// Creates every parameter in canonical order; this order fixes both the PRNG
// draw sequence and the checkpoint layout, and must stay in sync with the
// walk in parameters().
void Seq2SeqModel::register_params(Rng& rng) {
  const int n = config_.vocab_size;
  const int e = config_.embed_dim;
  const int d = config_.hidden_dim;
  const int dec_in = e + (config_.attention != AttentionMode::none ? d : 0);

  auto glorot = [&rng](const std::string& name, int rows, int cols) {
    Parameter p(name, Tensor({rows, cols}));
    const double bound = std::sqrt(6.0 / (rows + cols));
    for (double& v : p.value.data()) v = rng.uniform(-bound, bound);
    return p;
  };
  // Biases start at zero, except the forget-gate slice of an LSTM bias.
  auto lstm_bias = [d](const std::string& name) {
    Parameter p(name, Tensor({1, 4 * d}));
    for (int j = d; j < 2 * d; ++j) p.value.at(0, j) = 1.0;
    return p;
  };

  embed_ = glorot("embed", n, e);
  if (!config_.tie_output_embeddings) out_embed_ = glorot("out_embed", n, e);
  if (config_.kind == ModelKind::seq2seq) {
    encoder_.w_input = glorot("enc.w_in", 4 * d, e);
    encoder_.w_hidden = glorot("enc.w_h", 4 * d, d);
    encoder_.bias = lstm_bias("enc.b");
  }
  decoder_.w_input = glorot("dec.w_in", 4 * d, dec_in);
  decoder_.w_hidden = glorot("dec.w_h", 4 * d, d);
  decoder_.bias = lstm_bias("dec.b");

  mlp_w1_ = glorot("mlp.w1", d, d);
  mlp_b1_ = Parameter("mlp.b1", Tensor({1, d}));
  mlp_w2_ = glorot("mlp.w2", e, d);
  mlp_b2_ = Parameter("mlp.b2", Tensor({1, e}));

  const int k = head_count(config_);
  attention_.heads.resize(k);
  for (int i = 0; i < k; ++i) {
    const std::string prefix = "attn.head" + std::to_string(i) + ".";
    AttentionHeadParams& head = attention_.heads[i];
    if (config_.attention == AttentionMode::multi)
      head.projection = glorot(prefix + "proj", d, d);
    head.w_dec = glorot(prefix + "w_dec", d, d);
    head.w_enc = glorot(prefix + "w_enc", d, d);
    head.score_v = glorot(prefix + "v", d, 1);
  }
  if (config_.attention == AttentionMode::multi)
    attention_.combiner = glorot("attn.combiner", d, k * d);
}

std::vector<Parameter*> Seq2SeqModel::parameters() {
  std::vector<Parameter*> out;
  out.push_back(&embed_);
  if (!config_.tie_output_embeddings) out.push_back(&out_embed_);
  if (config_.kind == ModelKind::seq2seq) {
    out.push_back(&encoder_.w_input);
    out.push_back(&encoder_.w_hidden);
    out.push_back(&encoder_.bias);
  }
  out.push_back(&decoder_.w_input);
  out.push_back(&decoder_.w_hidden);
  out.push_back(&decoder_.bias);
  out.push_back(&mlp_w1_);
  out.push_back(&mlp_b1_);
  out.push_back(&mlp_w2_);
  out.push_back(&mlp_b2_);
  for (auto& head : attention_.heads) {
    if (config_.attention == AttentionMode::multi) out.push_back(&head.projection);
    out.push_back(&head.w_dec);
    out.push_back(&head.w_enc);
    out.push_back(&head.score_v);
  }
  if (config_.attention == AttentionMode::multi) out.push_back(&attention_.combiner);
  return out;
}

std::vector<const Parameter*> Seq2SeqModel::parameters() const {
  auto mut = const_cast<Seq2SeqModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

Parameter& Seq2SeqModel::parameter(const std::string& name) {
  for (Parameter* p : parameters())
    if (p->name == name) return *p;
  throw ConfigError("no parameter named " + name);
}

Seq2SeqModel::Bound Seq2SeqModel::bind_with(
    Tape& tape, const std::function<Tape::Id(const Parameter&)>& leaf) const {
  Bound b;
  b.embed = leaf(embed_);
  b.out_embed_t = tape.transpose(config_.tie_output_embeddings ? b.embed : leaf(out_embed_));
  if (config_.kind == ModelKind::seq2seq) {
    b.enc_w_in_t = tape.transpose(leaf(encoder_.w_input));
    b.enc_w_h_t = tape.transpose(leaf(encoder_.w_hidden));
    b.enc_bias = leaf(encoder_.bias);
  }
  b.dec_w_in_t = tape.transpose(leaf(decoder_.w_input));
  b.dec_w_h_t = tape.transpose(leaf(decoder_.w_hidden));
  b.dec_bias = leaf(decoder_.bias);
  b.mlp_w1_t = tape.transpose(leaf(mlp_w1_));
  b.mlp_b1 = leaf(mlp_b1_);
  b.mlp_w2_t = tape.transpose(leaf(mlp_w2_));
  b.mlp_b2 = leaf(mlp_b2_);
  for (const auto& head : attention_.heads) {
    Bound::BoundHead bh;
    if (config_.attention == AttentionMode::multi)
      bh.projection_t = tape.transpose(leaf(head.projection));
    bh.w_dec_t = tape.transpose(leaf(head.w_dec));
    bh.w_enc_t = tape.transpose(leaf(head.w_enc));
    bh.score_v = leaf(head.score_v);
    b.heads.push_back(bh);
  }
  if (config_.attention == AttentionMode::multi)
    b.combiner_t = tape.transpose(leaf(attention_.combiner));
  return b;
}

Seq2SeqModel::Bound Seq2SeqModel::bind(Tape& tape) const {
  return bind_with(tape, [&tape](const Parameter& p) { return tape.frozen(p); });
}

Seq2SeqModel::Bound Seq2SeqModel::bind_trainable(Tape& tape) {
  return bind_with(tape, [&tape](const Parameter& p) {
    // Sound: bind_trainable is only callable on a non-const model.
    return tape.parameter(const_cast<Parameter&>(p));
  });
}

Seq2SeqModel::TapeState Seq2SeqModel::encode_on_tape(Tape& tape, const Bound& b,
                                                     std::span<const int> input) const {
  if (config_.kind != ModelKind::seq2seq)
    throw ConfigError("encode on a decoder-only model");
  if (input.empty()) throw EmptySequenceError("encode: empty input sequence");
  const int d = config_.hidden_dim;
  Tape::Id h = tape.constant(Tensor({1, d}));
  Tape::Id c = tape.constant(Tensor({1, d}));
  BoundCell cell{b.enc_w_in_t, b.enc_w_h_t, b.enc_bias};
  std::vector<Tape::Id> states;
  states.reserve(input.size());
  for (int token : input) {
    Tape::Id x = tape.gather_rows(b.embed, {token});
    std::tie(h, c) = lstm_step(tape, cell, x, h, c, d);
    states.push_back(h);
  }
  TapeState out;
  out.h = h;
  out.c = c;
  out.enc_states = tape.concat_rows(states);
  return out;
}

Seq2SeqModel::TapeState Seq2SeqModel::initial_state_on_tape(Tape& tape, const Bound& b,
                                                            std::span<const int> input) const {
  if (config_.kind == ModelKind::decoder_only) {
    TapeState s;
    s.h = tape.constant(Tensor({1, config_.hidden_dim}));
    s.c = tape.constant(Tensor({1, config_.hidden_dim}));
    return s;
  }
  return encode_on_tape(tape, b, input);
}

std::pair<Tape::Id, Tape::Id> attention_head_on_tape(Tape& tape, Tape::Id enc_states,
                                                     Tape::Id h_dec, Tape::Id projection_t,
                                                     Tape::Id w_dec_t, Tape::Id w_enc_t,
                                                     Tape::Id score_v) {
  Tape::Id states = projection_t >= 0 ? tape.matmul(enc_states, projection_t) : enc_states;
  Tape::Id enc_part = tape.matmul(states, w_enc_t);
  Tape::Id dec_part = tape.matmul(h_dec, w_dec_t);
  Tape::Id scored = tape.tanh(tape.add_row_broadcast(enc_part, dec_part));
  Tape::Id scores = tape.transpose(tape.matmul(scored, score_v));  // [1 x T]
  Tape::Id weights = tape.softmax_rows(scores);
  Tape::Id context = tape.matmul(weights, states);
  return {weights, context};
}

std::pair<Tape::Id, std::vector<Tape::Id>> Seq2SeqModel::attention_on_tape(
    Tape& tape, const Bound& b, Tape::Id h_dec, Tape::Id enc_states) const {
  if (config_.attention == AttentionMode::none)
    throw ConfigError("attention_context on a model configured without attention");
  if (enc_states < 0)
    throw ConfigError("attention requires encoder states in the decoder state");
  std::vector<Tape::Id> weights;
  std::vector<Tape::Id> contexts;
  for (const auto& head : b.heads) {
    auto [w, ctx] = attention_head_on_tape(tape, enc_states, h_dec, head.projection_t,
                                           head.w_dec_t, head.w_enc_t, head.score_v);
    weights.push_back(w);
    contexts.push_back(ctx);
  }
  if (config_.attention == AttentionMode::single) return {contexts[0], weights};
  // Multi-head: concatenate per-head contexts, map back to d.
  std::vector<Tape::Id> cols;
  for (Tape::Id ctx : contexts) cols.push_back(tape.transpose(ctx));
  Tape::Id cat = tape.transpose(tape.concat_rows(cols));  // [1 x K*d]
  return {tape.matmul(cat, b.combiner_t), weights};
}

std::pair<Seq2SeqModel::TapeState, Tape::Id> Seq2SeqModel::decode_step_on_tape(
    Tape& tape, const Bound& b, const TapeState& state, int prev_token) const {
  const int d = config_.hidden_dim;
  Tape::Id x = tape.gather_rows(b.embed, {prev_token});
  if (config_.attention != AttentionMode::none) {
    auto [context, weights] = attention_on_tape(tape, b, state.h, state.enc_states);
    (void)weights;
    x = concat_cols(tape, x, context);
  }
  BoundCell cell{b.dec_w_in_t, b.dec_w_h_t, b.dec_bias};
  auto [h, c] = lstm_step(tape, cell, x, state.h, state.c, d);

  Tape::Id hidden = tape.tanh(tape.add(tape.matmul(h, b.mlp_w1_t), b.mlp_b1));
  Tape::Id projected = tape.add(tape.matmul(hidden, b.mlp_w2_t), b.mlp_b2);
  Tape::Id logits = tape.matmul(projected, b.out_embed_t);
  Tape::Id dist = tape.softmax_rows(logits);

  TapeState next;
  next.h = h;
  next.c = c;
  next.enc_states = state.enc_states;
  return {next, dist};
}

EncodeResult Seq2SeqModel::encode(std::span<const int> input) const {
  Tape tape;
  Bound b = bind(tape);
  TapeState s = encode_on_tape(tape, b, input);
  return EncodeResult{tape.value(s.enc_states), tape.value(s.h), tape.value(s.c)};
}

DecoderState Seq2SeqModel::decoder_init(const EncodeResult& encoded) const {
  DecoderState state;
  state.h = encoded.final_h;
  state.c = encoded.final_c;
  if (config_.attention != AttentionMode::none) state.enc_states = encoded.states;
  return state;
}

DecoderState Seq2SeqModel::initial_state(std::span<const int> input) const {
  if (config_.kind == ModelKind::decoder_only) {
    DecoderState state;
    state.h = Tensor({1, config_.hidden_dim});
    state.c = Tensor({1, config_.hidden_dim});
    return state;
  }
  return decoder_init(encode(input));
}

std::pair<DecoderState, Tensor> Seq2SeqModel::decode_step(const DecoderState& state,
                                                          int prev_token) const {
  Tape tape;
  Bound b = bind(tape);
  TapeState ts;
  ts.h = tape.constant(state.h);
  ts.c = tape.constant(state.c);
  if (state.has_enc_states()) ts.enc_states = tape.constant(state.enc_states);
  auto [next, dist] = decode_step_on_tape(tape, b, ts, prev_token);
  DecoderState out;
  out.h = tape.value(next.h);
  out.c = tape.value(next.c);
  out.enc_states = state.enc_states;
  return {std::move(out), tape.value(dist)};
}

AttentionResult Seq2SeqModel::attention_context(const DecoderState& state) const {
  if (config_.attention == AttentionMode::none)
    throw ConfigError("attention_context on a model configured without attention");
  if (!state.has_enc_states())
    throw ConfigError("attention_context: decoder state has no encoder states");
  Tape tape;
  Bound b = bind(tape);
  Tape::Id h = tape.constant(state.h);
  Tape::Id enc = tape.constant(state.enc_states);
  auto [context, weights] = attention_on_tape(tape, b, h, enc);
  AttentionResult result;
  result.context = tape.value(context);
  for (Tape::Id w : weights) result.head_weights.push_back(tape.value(w));
  return result;
}

double Seq2SeqModel::sequence_log_prob(std::span<const int> input,
                                       std::span<const int> target) const {
  if (target.empty()) throw EmptySequenceError("sequence_log_prob: empty target");
  Tape tape;
  Bound b = bind(tape);
  TapeState state = initial_state_on_tape(tape, b, input);
  int prev = Vocabulary::kStart;
  double total = 0.0;
  for (int token : target) {
    auto [next, dist] = decode_step_on_tape(tape, b, state, prev);
    if (token < 0 || token >= config_.vocab_size)
      throw IndexError("sequence_log_prob: token " + std::to_string(token) + " out of range");
    total += std::log(tape.value(dist).at(0, token));
    state = next;
    prev = token;
  }
  return total;
}

}  // namespace seqlab
