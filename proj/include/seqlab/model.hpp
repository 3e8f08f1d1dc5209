#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/rng.hpp"
#include "seqlab/tape.hpp"
#include "seqlab/tensor.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

enum class AttentionMode { none, single, multi };

// seq2seq conditions the decoder on an encoded input; decoder_only is the
// unconditioned language-model variant (zero initial state, no encoder).
enum class ModelKind { seq2seq, decoder_only };

struct ModelConfig {
  int vocab_size = 0;  // N, counting the four reserved ids
  int embed_dim = 0;
  int hidden_dim = 0;
  AttentionMode attention = AttentionMode::none;
  int heads = 0;  // K, multi-head only
  bool tie_output_embeddings = true;
  ModelKind kind = ModelKind::seq2seq;

  void validate() const;
};

// One LSTM cell. Gate order along the 4d axis is [input, forget, cell,
// output]; the forget slice of the bias starts at 1, everything else at 0.
struct LstmCellParams {
  Parameter w_input;   // [4d x input_dim]
  Parameter w_hidden;  // [4d x d]
  Parameter bias;      // [1 x 4d]
};

// Additive scorer for one attention head: score_t = v^T tanh(W_dec h_dec +
// W_enc h_t). Multi-head adds a per-head projection of the encoder states and
// a combiner that maps the concatenated head contexts back to d.
struct AttentionHeadParams {
  Parameter projection;  // [d x d], multi-head only
  Parameter w_dec;       // [d x d]
  Parameter w_enc;       // [d x d]
  Parameter score_v;     // [d x 1]
};

struct AttentionParams {
  std::vector<AttentionHeadParams> heads;
  Parameter combiner;  // [d x K*d], multi-head only
};

// Plain-value decoder state, cheap to snapshot per beam-search hypothesis.
struct DecoderState {
  Tensor h;  // [1 x d]
  Tensor c;  // [1 x d]
  // [|X| x d]; populated iff the model uses attention.
  Tensor enc_states;

  bool has_enc_states() const { return !enc_states.empty(); }
};

struct EncodeResult {
  Tensor states;  // [|X| x d], one row per input step
  Tensor final_h;  // [1 x d]
  Tensor final_c;  // [1 x d]
};

struct AttentionResult {
  Tensor context;                    // [1 x d]
  std::vector<Tensor> head_weights;  // per head, [1 x |X|]
};

class Seq2SeqModel {
public:
  // Node ids for one tape binding of the parameters, transposed where the
  // row-vector forward form consumes them.
  struct Bound {
    Tape::Id embed = -1;        // [N x e]
    Tape::Id out_embed_t = -1;  // [e x N]
    Tape::Id enc_w_in_t = -1, enc_w_h_t = -1, enc_bias = -1;
    Tape::Id dec_w_in_t = -1, dec_w_h_t = -1, dec_bias = -1;
    Tape::Id mlp_w1_t = -1, mlp_b1 = -1, mlp_w2_t = -1, mlp_b2 = -1;
    struct BoundHead {
      Tape::Id projection_t = -1;
      Tape::Id w_dec_t = -1, w_enc_t = -1, score_v = -1;
    };
    std::vector<BoundHead> heads;
    Tape::Id combiner_t = -1;
  };

  // Tape-threaded decoder state used by training and rescoring.
  struct TapeState {
    Tape::Id h = -1;
    Tape::Id c = -1;
    Tape::Id enc_states = -1;
  };

  Seq2SeqModel(ModelConfig config, Vocabulary vocab, Rng& rng);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }

  // Parameters in registration order (also the checkpoint order).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  Parameter& parameter(const std::string& name);

  // --- plain-value inference ---

  EncodeResult encode(std::span<const int> input) const;

  DecoderState decoder_init(const EncodeResult& encoded) const;

  // Zero state for decoder_only models, encode + decoder_init otherwise.
  DecoderState initial_state(std::span<const int> input) const;

  // Consumes the previous output token, returns the advanced state and the
  // probability distribution over all N candidates for the current position.
  std::pair<DecoderState, Tensor> decode_step(const DecoderState& state, int prev_token) const;

  AttentionResult attention_context(const DecoderState& state) const;

  // Teacher-forced log p(target | input); the input is ignored by
  // decoder_only models. target must be non-empty.
  double sequence_log_prob(std::span<const int> input, std::span<const int> target) const;

  // --- tape-threaded forward (training path) ---

  Bound bind(Tape& tape) const;  // read-only leaves; backward drops grads here
  Bound bind_trainable(Tape& tape);

  TapeState encode_on_tape(Tape& tape, const Bound& b, std::span<const int> input) const;
  TapeState initial_state_on_tape(Tape& tape, const Bound& b, std::span<const int> input) const;
  std::pair<TapeState, Tape::Id> decode_step_on_tape(Tape& tape, const Bound& b,
                                                     const TapeState& state,
                                                     int prev_token) const;

  // Context plus per-head attention weights for the current state.
  std::pair<Tape::Id, std::vector<Tape::Id>> attention_on_tape(Tape& tape, const Bound& b,
                                                               Tape::Id h_dec,
                                                               Tape::Id enc_states) const;

private:
  Bound bind_with(Tape& tape, const std::function<Tape::Id(const Parameter&)>& leaf) const;
  void register_params(Rng& rng);

  ModelConfig config_;
  Vocabulary vocab_;

  Parameter embed_;
  Parameter out_embed_;  // untied output candidates; unused when tied
  LstmCellParams encoder_;
  LstmCellParams decoder_;
  Parameter mlp_w1_, mlp_b1_, mlp_w2_, mlp_b2_;
  AttentionParams attention_;
};

// Standalone additive-attention head over plain values: projects the encoder
// states when `projection` is non-empty, scores them against `h_dec`, and
// returns the per-position weights plus the context in the (projected) space.
// Shared by the model and by tests that exercise head algebra directly.
std::pair<Tape::Id, Tape::Id> attention_head_on_tape(Tape& tape, Tape::Id enc_states,
                                                     Tape::Id h_dec, Tape::Id projection_t,
                                                     Tape::Id w_dec_t, Tape::Id w_enc_t,
                                                     Tape::Id score_v);

}  // namespace seqlab
