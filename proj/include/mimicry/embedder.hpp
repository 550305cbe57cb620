#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace mimicry {

using TokenSeq = std::vector<std::string>;

struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr std::size_t kSpecials = 4;

  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;
  std::size_t max_size = 0;

  std::size_t size() const noexcept { return tokens.size(); }
  int encode(const std::string &token) const;
  std::vector<int> encode(std::span<const std::string> seq) const;
};

/// Keeps the `max_size - 4` most frequent tokens (ties lexicographic) after
/// the special tokens <pad>, <unk>, <bos>, <eos>. Throws EmptyCorpus.
Vocab build_vocab(std::span<const TokenSeq> corpus, std::size_t max_size);

struct EmbedderConfig {
  std::size_t max_len = 150;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 128;
  std::size_t epochs = 10;
  double learning_rate = 0.2;
  std::uint64_t seed = 1;
  std::size_t vocab_size = 5000;
  /// Global gradient-norm clip per update; 0 disables.
  double clip_norm = 5.0;

  void validate() const;
};

/// Single-head attention followed by a tanh feed-forward layer, both with
/// residual connections. The encoder attends to itself, the decoder to the
/// encoder outputs.
struct AttentionBlock {
  Eigen::MatrixXd wq, wk, wv, wo;
  Eigen::MatrixXd w1, b1, w2, b2;
};

struct ModelParams {
  Eigen::MatrixXd token_embedding;   // vocab x d
  Eigen::MatrixXd encoder_positions; // (max_len + 2) x d
  AttentionBlock encoder;
  Eigen::MatrixXd decoder_positions; // (max_len + 1) x d
  AttentionBlock decoder;
  Eigen::MatrixXd output;      // d x vocab
  Eigen::MatrixXd output_bias; // 1 x vocab

  /// Zero tensors with the same shapes.
  ModelParams zeros_like() const;
  std::size_t parameter_count() const;

  template <class Self, class F> static void visit(Self &p, F &&f) {
    f(p.token_embedding);
    f(p.encoder_positions);
    visit_block(p.encoder, f);
    f(p.decoder_positions);
    visit_block(p.decoder, f);
    f(p.output);
    f(p.output_bias);
  }

private:
  template <class Block, class F> static void visit_block(Block &b, F &f) {
    f(b.wq);
    f(b.wk);
    f(b.wv);
    f(b.wo);
    f(b.w1);
    f(b.b1);
    f(b.w2);
    f(b.b2);
  }
};

/// Autoencoder over annotated token sequences.
///
/// The encoder reads `<bos> tokens <eos>`; its outputs are mean-pooled into the
/// sequence embedding. Decoder queries are learned positions plus that
/// embedding; they attend over the encoder outputs and predict `tokens <eos>`
/// position by position. The decoder exists to drive the reconstruction loss;
/// inference uses `embed`.
class EncoderDecoderModel {
public:
  EncoderDecoderModel() = default;
  EncoderDecoderModel(Vocab vocab, EmbedderConfig config);

  const Vocab &vocab() const noexcept { return vocab_; }
  const EmbedderConfig &config() const noexcept { return config_; }
  ModelParams &params() noexcept { return params_; }
  const ModelParams &params() const noexcept { return params_; }

  /// Mean over encoder outputs. Throws SequenceTooLong.
  Eigen::VectorXd embed(std::span<const std::string> seq) const;

  /// Mean per-position cross-entropy of reconstructing `seq`.
  double loss(std::span<const std::string> seq) const;
  double loss_ids(std::span<const int> ids) const;

  /// Loss plus gradients accumulated into `grad` (same shapes as params()).
  double loss_and_gradient(std::span<const int> ids, ModelParams &grad) const;

  /// Softmax outputs, one row per reconstructed position (tokens + <eos>).
  Eigen::MatrixXd output_distribution(std::span<const std::string> seq) const;

  /// Argmax token ids per reconstructed position.
  std::vector<int> reconstruct(std::span<const std::string> seq) const;

  /// Fraction of positions (tokens + <eos>) reconstructed exactly.
  double reconstruction_accuracy(std::span<const TokenSeq> corpus) const;

  void save(const std::filesystem::path &path) const;
  static EncoderDecoderModel load(const std::filesystem::path &path);

private:
  void check_length(std::size_t n) const;

  Vocab vocab_;
  EmbedderConfig config_;
  ModelParams params_;
};

struct TrainingHistory {
  std::vector<double> epoch_loss;
};

/// Seeded SGD on the reconstruction loss, one sequence per update.
/// Throws NonFiniteLoss, SequenceTooLong, EmptyCorpus.
EncoderDecoderModel train(std::span<const TokenSeq> corpus, const EmbedderConfig &cfg,
                          TrainingHistory *history = nullptr);

inline Eigen::VectorXd embed(const EncoderDecoderModel &model, std::span<const std::string> seq) {
  return model.embed(seq);
}

/// Largest relative error between analytic and central-difference gradients
/// over a seeded random subset of `samples` parameters that the sample can
/// reach. Relative error is |a - n| / max(|a|, |n|, 1e-8).
double grad_check(const EncoderDecoderModel &model, std::span<const std::string> sample, double epsilon,
                  std::size_t samples = 128, std::uint64_t seed = 7);

} // namespace mimicry
