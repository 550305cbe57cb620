#include "mimicry/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "mimicry/error.hpp"
#include "mimicry/rng.hpp"

namespace mimicry {
namespace {

using Mat = Eigen::MatrixXd;

constexpr char kMagic[8] = {'M', 'I', 'M', 'E', 'M', 'B', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

// Positions in ModelParams::visit order.
constexpr std::size_t kTokenEmbedding = 0;
constexpr std::size_t kEncoderPositions = 1;
constexpr std::size_t kDecoderPositions = 10;

Mat row_softmax(const Mat &s) {
  Mat out(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double m = s.row(r).maxCoeff();
    out.row(r) = (s.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

struct BlockCache {
  Mat x, kv, q, k, v, p, c, y1, a;
};

// Queries come from x, keys and values from kv (kv == x for self-attention).
Mat block_forward(const AttentionBlock &b, const Mat &x, const Mat &kv, BlockCache &c) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  c.x = x;
  c.kv = kv;
  c.q = x * b.wq;
  c.k = kv * b.wk;
  c.v = kv * b.wv;
  c.p = row_softmax((c.q * c.k.transpose()) * scale);
  c.c = c.p * c.v;
  c.y1 = x + c.c * b.wo;
  Mat u = c.y1 * b.w1;
  u.rowwise() += b.b1.row(0);
  c.a = u.array().tanh().matrix();
  Mat y = c.y1 + c.a * b.w2;
  y.rowwise() += b.b2.row(0);
  return y;
}

// Returns the gradient for x; the gradient for kv goes to dkv.
Mat block_backward(const AttentionBlock &b, const BlockCache &c, const Mat &dy, AttentionBlock &g, Mat &dkv) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(c.x.cols()));
  g.w2 += c.a.transpose() * dy;
  g.b2 += dy.colwise().sum();
  const Mat du = ((dy * b.w2.transpose()).array() * (1.0 - c.a.array().square())).matrix();
  g.w1 += c.y1.transpose() * du;
  g.b1 += du.colwise().sum();
  const Mat dy1 = dy + du * b.w1.transpose();

  g.wo += c.c.transpose() * dy1;
  const Mat dc = dy1 * b.wo.transpose();
  const Mat dp = dc * c.v.transpose();
  const Mat dv = c.p.transpose() * dc;
  const Eigen::VectorXd dot = (dp.array() * c.p.array()).rowwise().sum();
  const Mat ds = ((dp.colwise() - dot).array() * c.p.array()).matrix() * scale;
  const Mat dq = ds * c.k;
  const Mat dk = ds.transpose() * c.q;

  g.wq += c.x.transpose() * dq;
  g.wk += c.kv.transpose() * dk;
  g.wv += c.kv.transpose() * dv;
  dkv = dk * b.wk.transpose() + dv * b.wv.transpose();
  return dy1 + dq * b.wq.transpose();
}

struct ForwardCache {
  std::vector<int> input; // <bos> ids <eos>
  std::vector<int> target; // ids <eos>
  BlockCache enc, dec;
  Mat h;       // encoder outputs
  Mat z;       // 1 x d
  Mat g;       // decoder outputs
  Mat probs;   // T x V
};

Mat uniform_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double limit) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-limit, limit);
  return m;
}

AttentionBlock init_block(Rng &rng, Eigen::Index d, Eigen::Index h) {
  const double attn = std::sqrt(6.0 / static_cast<double>(2 * d));
  const double ff = std::sqrt(6.0 / static_cast<double>(d + h));
  AttentionBlock b;
  b.wq = uniform_matrix(rng, d, d, attn);
  b.wk = uniform_matrix(rng, d, d, attn);
  b.wv = uniform_matrix(rng, d, d, attn);
  b.wo = uniform_matrix(rng, d, d, attn);
  b.w1 = uniform_matrix(rng, d, h, ff);
  b.b1 = Mat::Zero(1, h);
  b.w2 = uniform_matrix(rng, h, d, ff);
  b.b2 = Mat::Zero(1, d);
  return b;
}

double forward(const ModelParams &p, std::span<const int> ids, ForwardCache &c) {
  c.input.assign(1, Vocab::kBos);
  c.input.insert(c.input.end(), ids.begin(), ids.end());
  c.input.push_back(Vocab::kEos);
  c.target.assign(ids.begin(), ids.end());
  c.target.push_back(Vocab::kEos);

  const auto len = static_cast<Eigen::Index>(c.input.size());
  const auto tlen = static_cast<Eigen::Index>(c.target.size());
  const auto d = p.token_embedding.cols();

  Mat x(len, d);
  for (Eigen::Index i = 0; i < len; ++i)
    x.row(i) = p.token_embedding.row(c.input[static_cast<std::size_t>(i)]) + p.encoder_positions.row(i);
  c.h = block_forward(p.encoder, x, x, c.enc);
  c.z = c.h.colwise().mean();

  Mat dx = p.decoder_positions.topRows(tlen);
  dx.rowwise() += c.z.row(0);
  c.g = block_forward(p.decoder, dx, c.h, c.dec);
  Mat logits = c.g * p.output;
  logits.rowwise() += p.output_bias.row(0);
  c.probs = row_softmax(logits);

  double loss = 0.0;
  for (Eigen::Index t = 0; t < tlen; ++t) loss -= std::log(c.probs(t, c.target[static_cast<std::size_t>(t)]));
  return loss / static_cast<double>(tlen);
}

void backward(const ModelParams &p, const ForwardCache &c, ModelParams &g) {
  const auto tlen = static_cast<Eigen::Index>(c.target.size());
  const auto len = static_cast<Eigen::Index>(c.input.size());

  Mat dlogits = c.probs;
  for (Eigen::Index t = 0; t < tlen; ++t) dlogits(t, c.target[static_cast<std::size_t>(t)]) -= 1.0;
  dlogits /= static_cast<double>(tlen);

  g.output += c.g.transpose() * dlogits;
  g.output_bias += dlogits.colwise().sum();
  const Mat dg = dlogits * p.output.transpose();
  Mat dh;
  const Mat ddec = block_backward(p.decoder, c.dec, dg, g.decoder, dh);
  g.decoder_positions.topRows(tlen) += ddec;
  const Mat dz = ddec.colwise().sum();

  dh.rowwise() += dz.row(0) / static_cast<double>(len);
  Mat dself;
  Mat dx = block_backward(p.encoder, c.enc, dh, g.encoder, dself);
  dx += dself;
  for (Eigen::Index i = 0; i < len; ++i) {
    g.token_embedding.row(c.input[static_cast<std::size_t>(i)]) += dx.row(i);
    g.encoder_positions.row(i) += dx.row(i);
  }
}

template <class T> void write_pod(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T> T read_pod(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::Io, "truncated model file");
  return v;
}

void write_string(std::ostream &out, const std::string &s) {
  write_pod(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream &in) {
  const auto n = read_pod<std::uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw Error(ErrorKind::Io, "truncated model file");
  return s;
}

} // namespace

int Vocab::encode(const std::string &token) const {
  const auto it = index.find(token);
  return it == index.end() ? kUnk : it->second;
}

std::vector<int> Vocab::encode(std::span<const std::string> seq) const {
  std::vector<int> out;
  out.reserve(seq.size());
  for (const auto &t : seq) out.push_back(encode(t));
  return out;
}

Vocab build_vocab(std::span<const TokenSeq> corpus, std::size_t max_size) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a vocabulary from nothing");
  if (max_size < Vocab::kSpecials) throw Error(ErrorKind::ConfigInvalid, "vocabulary must hold the 4 special tokens");
  std::map<std::string, std::size_t> counts;
  for (const auto &seq : corpus)
    for (const auto &t : seq) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::ranges::stable_sort(ranked, [](const auto &a, const auto &b) { return a.second > b.second; });

  Vocab v;
  v.max_size = max_size;
  v.tokens = {"<pad>", "<unk>", "<bos>", "<eos>"};
  for (const auto &[tok, n] : ranked) {
    if (v.tokens.size() >= max_size) break;
    if (std::ranges::find(v.tokens, tok) != v.tokens.end()) continue;
    v.tokens.push_back(tok);
  }
  for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index.emplace(v.tokens[i], static_cast<int>(i));
  return v;
}

void EmbedderConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::ConfigInvalid, "embedder.epochs must be >= 1");
  if (max_len < 1 || embed_dim < 1 || hidden_dim < 1) throw Error(ErrorKind::ConfigInvalid, "embedder dims must be >= 1");
  if (!(learning_rate > 0)) throw Error(ErrorKind::ConfigInvalid, "embedder.learning_rate must be positive");
  if (vocab_size < Vocab::kSpecials) throw Error(ErrorKind::ConfigInvalid, "embedder.vocab_size must be >= 4");
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  visit(z, [](Mat &m) { m.setZero(); });
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit(*this, [&](const Mat &m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

EncoderDecoderModel::EncoderDecoderModel(Vocab vocab, EmbedderConfig config)
    : vocab_(std::move(vocab)), config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  const auto d = static_cast<Eigen::Index>(config_.embed_dim);
  const auto h = static_cast<Eigen::Index>(config_.hidden_dim);
  const auto len = static_cast<Eigen::Index>(config_.max_len);
  params_.token_embedding = uniform_matrix(rng, v, d, 0.5);
  params_.encoder_positions = uniform_matrix(rng, len + 2, d, 1.0);
  params_.encoder = init_block(rng, d, h);
  params_.decoder = init_block(rng, d, h);
  // Output position t starts aligned with input position t + 1 (after <bos>):
  // same positional vector, identity query and key maps.
  params_.decoder_positions = params_.encoder_positions.bottomRows(len + 1);
  params_.decoder.wq.setIdentity();
  params_.decoder.wk.setIdentity();
  params_.output = uniform_matrix(rng, d, v, std::sqrt(6.0 / static_cast<double>(d + v)));
  params_.output_bias = Mat::Zero(1, v);
}

void EncoderDecoderModel::check_length(std::size_t n) const {
  if (n > config_.max_len)
    throw Error(ErrorKind::SequenceTooLong,
                std::to_string(n) + " tokens exceeds max_len " + std::to_string(config_.max_len));
}

Eigen::VectorXd EncoderDecoderModel::embed(std::span<const std::string> seq) const {
  check_length(seq.size());
  ForwardCache c;
  const auto ids = vocab_.encode(seq);
  forward(params_, ids, c);
  return c.z.row(0).transpose();
}

double EncoderDecoderModel::loss(std::span<const std::string> seq) const {
  check_length(seq.size());
  return loss_ids(vocab_.encode(seq));
}

double EncoderDecoderModel::loss_ids(std::span<const int> ids) const {
  check_length(ids.size());
  ForwardCache c;
  return forward(params_, ids, c);
}

double EncoderDecoderModel::loss_and_gradient(std::span<const int> ids, ModelParams &grad) const {
  check_length(ids.size());
  ForwardCache c;
  const double l = forward(params_, ids, c);
  backward(params_, c, grad);
  return l;
}

Eigen::MatrixXd EncoderDecoderModel::output_distribution(std::span<const std::string> seq) const {
  check_length(seq.size());
  ForwardCache c;
  forward(params_, vocab_.encode(seq), c);
  return c.probs;
}

std::vector<int> EncoderDecoderModel::reconstruct(std::span<const std::string> seq) const {
  const Mat probs = output_distribution(seq);
  std::vector<int> out;
  for (Eigen::Index t = 0; t < probs.rows(); ++t) {
    Eigen::Index arg = 0;
    probs.row(t).maxCoeff(&arg);
    out.push_back(static_cast<int>(arg));
  }
  return out;
}

double EncoderDecoderModel::reconstruction_accuracy(std::span<const TokenSeq> corpus) const {
  std::size_t hit = 0;
  std::size_t total = 0;
  for (const auto &seq : corpus) {
    auto target = vocab_.encode(seq);
    target.push_back(Vocab::kEos);
    const auto got = reconstruct(seq);
    for (std::size_t i = 0; i < target.size(); ++i) hit += got[i] == target[i];
    total += target.size();
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 1.0;
}

void EncoderDecoderModel::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(config_.max_len));
  write_pod(out, static_cast<std::uint64_t>(config_.embed_dim));
  write_pod(out, static_cast<std::uint64_t>(config_.hidden_dim));
  write_pod(out, static_cast<std::uint64_t>(config_.epochs));
  write_pod(out, config_.learning_rate);
  write_pod(out, config_.seed);
  write_pod(out, static_cast<std::uint64_t>(config_.vocab_size));
  write_pod(out, config_.clip_norm);
  write_pod(out, static_cast<std::uint64_t>(vocab_.max_size));
  write_pod(out, static_cast<std::uint32_t>(vocab_.size()));
  for (const auto &t : vocab_.tokens) write_string(out, t);
  ModelParams::visit(params_, [&](const Mat &m) {
    write_pod(out, static_cast<std::uint32_t>(m.rows()));
    write_pod(out, static_cast<std::uint32_t>(m.cols()));
    // Column-major, the storage order of Eigen::MatrixXd.
    out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  });
}

EncoderDecoderModel EncoderDecoderModel::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingUpstreamArtifact, "model file " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(ErrorKind::Io, "not an embedder model file");
  if (const auto v = read_pod<std::uint32_t>(in); v != kVersion)
    throw Error(ErrorKind::Io, "unsupported model version " + std::to_string(v));

  EncoderDecoderModel model;
  auto &cfg = model.config_;
  cfg.max_len = read_pod<std::uint64_t>(in);
  cfg.embed_dim = read_pod<std::uint64_t>(in);
  cfg.hidden_dim = read_pod<std::uint64_t>(in);
  cfg.epochs = read_pod<std::uint64_t>(in);
  cfg.learning_rate = read_pod<double>(in);
  cfg.seed = read_pod<std::uint64_t>(in);
  cfg.vocab_size = read_pod<std::uint64_t>(in);
  cfg.clip_norm = read_pod<double>(in);
  model.vocab_.max_size = read_pod<std::uint64_t>(in);
  const auto n = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    model.vocab_.tokens.push_back(read_string(in));
    model.vocab_.index.emplace(model.vocab_.tokens.back(), static_cast<int>(i));
  }
  ModelParams::visit(model.params_, [&](Mat &m) {
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    m.resize(rows, cols);
    in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw Error(ErrorKind::Io, "truncated model file");
  });
  return model;
}

EncoderDecoderModel train(std::span<const TokenSeq> corpus, const EmbedderConfig &cfg, TrainingHistory *history) {
  cfg.validate();
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "no sequences to train on");
  for (const auto &seq : corpus)
    if (seq.size() > cfg.max_len)
      throw Error(ErrorKind::SequenceTooLong, "training sequence of " + std::to_string(seq.size()) + " tokens");

  EncoderDecoderModel model(build_vocab(corpus, cfg.vocab_size), cfg);
  std::vector<std::vector<int>> encoded;
  encoded.reserve(corpus.size());
  for (const auto &seq : corpus) encoded.push_back(model.vocab().encode(seq));

  std::vector<std::size_t> order(encoded.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(cfg.seed, 0x5eed));
  ModelParams grad = model.params().zeros_like();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double total = 0.0;
    for (auto idx : order) {
      ModelParams::visit(grad, [](Mat &m) { m.setZero(); });
      const double l = model.loss_and_gradient(encoded[idx], grad);
      if (!std::isfinite(l))
        throw Error(ErrorKind::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", sequence " + std::to_string(idx));
      total += l;

      double step = cfg.learning_rate;
      if (cfg.clip_norm > 0) {
        double sq = 0.0;
        ModelParams::visit(std::as_const(grad), [&](const Mat &m) { sq += m.squaredNorm(); });
        const double norm = std::sqrt(sq);
        if (norm > cfg.clip_norm) step *= cfg.clip_norm / norm;
      }
      // Walk params and grads in lockstep; visit order is fixed.
      std::vector<Mat *> ps;
      ModelParams::visit(model.params(), [&](Mat &m) { ps.push_back(&m); });
      std::size_t i = 0;
      ModelParams::visit(std::as_const(grad), [&](const Mat &g) { *ps[i++] -= step * g; });
    }
    const double mean = total / static_cast<double>(encoded.size());
    spdlog::debug("embedder epoch {}: mean loss {:.6f}", epoch + 1, mean);
    if (history) history->epoch_loss.push_back(mean);
  }
  return model;
}

double grad_check(const EncoderDecoderModel &model, std::span<const std::string> sample, double epsilon,
                  std::size_t samples, std::uint64_t seed) {
  const auto ids = model.vocab().encode(sample);
  ModelParams analytic = model.params().zeros_like();
  model.loss_and_gradient(ids, analytic);

  EncoderDecoderModel probe = model;
  std::vector<Mat *> params;
  std::vector<const Mat *> grads;
  ModelParams::visit(probe.params(), [&](Mat &m) { params.push_back(&m); });
  ModelParams::visit(std::as_const(analytic), [&](const Mat &m) { grads.push_back(&m); });

  // Reachable: every entry except embedding rows of absent tokens and
  // positional rows past the sequence length.
  std::vector<int> present(1, Vocab::kBos);
  present.insert(present.end(), ids.begin(), ids.end());
  present.push_back(Vocab::kEos);
  std::ranges::sort(present);
  const auto in_len = static_cast<Eigen::Index>(ids.size() + 2);
  const auto out_len = static_cast<Eigen::Index>(ids.size() + 1);

  std::vector<std::pair<std::size_t, Eigen::Index>> candidates;
  for (std::size_t t = 0; t < params.size(); ++t) {
    const Mat &m = *params[t];
    for (Eigen::Index col = 0; col < m.cols(); ++col)
      for (Eigen::Index row = 0; row < m.rows(); ++row) {
        if (t == kTokenEmbedding && !std::ranges::binary_search(present, static_cast<int>(row))) continue;
        if (t == kEncoderPositions && row >= in_len) continue;
        if (t == kDecoderPositions && row >= out_len) continue;
        candidates.emplace_back(t, col * m.rows() + row);
      }
  }
  Rng rng(seed);
  rng.shuffle(std::span(candidates));
  if (candidates.size() > samples) candidates.resize(samples);

  double worst = 0.0;
  for (const auto &[t, flat] : candidates) {
    double &w = params[t]->data()[flat];
    const double saved = w;
    w = saved + epsilon;
    const double up = probe.loss_ids(ids);
    w = saved - epsilon;
    const double down = probe.loss_ids(ids);
    w = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = grads[t]->data()[flat];
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
    worst = std::max(worst, rel);
  }
  return worst;
}

} // namespace mimicry
