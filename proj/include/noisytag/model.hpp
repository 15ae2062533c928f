#pragma once

// The three network components: a SampleCNN-style raw-waveform encoder with
// its contrastive projector (together the feature extractor), the domain
// classifier, and the label predictor. Parameter collections are grouped the
// way the training stages freeze them: fe = encoder + projector, dc, lp.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "noisytag/errors.hpp"
#include "noisytag/layers.hpp"
#include "noisytag/rng.hpp"
#include "noisytag/tensor.hpp"

namespace noisytag {

struct EncoderConfig {
  std::size_t input_length = 59049;  // 3^10
  int n_blocks = 9;                  // plus the initial stride-3 conv
  int base_channels = 128;
  int embedding_dim = 512;

  void check() const {
    std::size_t stride_product = 3;  // initial conv
    for (int i = 0; i < n_blocks; ++i) stride_product *= 3;
    if (stride_product != input_length) {
      throw ConfigError("encoder: input_length must equal 3^(n_blocks+1)");
    }
    if (base_channels < 1 || embedding_dim < 1) {
      throw ConfigError("encoder: channel counts must be positive");
    }
    if (base_channels > embedding_dim) {
      throw ConfigError("encoder: base_channels must not exceed embedding_dim");
    }
  }

  // Channel ladder: doubles every other block, capped at embedding_dim; the
  // last block always lands on embedding_dim so the flattened length-1
  // output is the embedding.
  std::vector<std::size_t> channel_ladder() const {
    std::vector<std::size_t> ch(static_cast<std::size_t>(n_blocks));
    std::size_t c = static_cast<std::size_t>(base_channels);
    for (int i = 0; i < n_blocks; ++i) {
      ch[static_cast<std::size_t>(i)] = c;
      if (i % 2 == 1 && 2 * c <= static_cast<std::size_t>(embedding_dim)) c *= 2;
    }
    ch.back() = static_cast<std::size_t>(embedding_dim);
    return ch;
  }
};

template <class Real>
class SampleCnnEncoder {
 public:
  explicit SampleCnnEncoder(const EncoderConfig& cfg) : cfg_(cfg) {
    cfg.check();
    const auto ladder = cfg.channel_ladder();
    stem_ = std::make_unique<Conv1d<Real>>("encoder.stem", 1,
                                           static_cast<std::size_t>(cfg.base_channels), 3, 3, 0);
    std::size_t in_ch = static_cast<std::size_t>(cfg.base_channels);
    for (int i = 0; i < cfg.n_blocks; ++i) {
      const std::size_t out_ch = ladder[static_cast<std::size_t>(i)];
      const std::string base = "encoder.block" + std::to_string(i);
      blocks_.push_back(Block{
          std::make_unique<Conv1d<Real>>(base + ".conv", in_ch, out_ch, 3, 1, 1),
          std::make_unique<BatchNorm1d<Real>>(base + ".bn", out_ch),
          Relu3<Real>{}, MaxPool3<Real>{3}});
      in_ch = out_ch;
    }
  }

  void init(Rng& rng) {
    stem_->init(rng);
    for (auto& b : blocks_) b.conv->init(rng);
  }

  const EncoderConfig& config() const { return cfg_; }

  Array2<Real> forward(const Array3<Real>& wave, bool train) {
    if (wave.ch != 1 || wave.len != cfg_.input_length) {
      throw ShapeMismatch("encoder: expected [n, 1, " +
                          std::to_string(cfg_.input_length) + "] input");
    }
    Array3<Real> h = stem_->forward(wave);
    for (auto& b : blocks_) {
      h = b.conv->forward(h);
      h = b.bn->forward(h, train);
      h = b.relu.forward(h);
      h = b.pool.forward(h);
    }
    return squeeze_time(std::move(h));
  }

  // Gradient w.r.t. the input waveform is materialized but callers usually
  // discard it; parameter gradients accumulate in place.
  Array3<Real> backward(const Array2<Real>& grad_embedding) {
    Array2<Real> g2 = grad_embedding;
    Array3<Real> g = unsqueeze_time(std::move(g2));
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) {
      g = it->pool.backward(g);
      g = it->relu.backward(g);
      g = it->bn->backward(g);
      g = it->conv->backward(g);
    }
    return stem_->backward(g);
  }

  ParamRefs<Real> params() {
    ParamRefs<Real> out = stem_->params();
    for (auto& b : blocks_) {
      for (auto* p : b.conv->params()) out.push_back(p);
      for (auto* p : b.bn->params()) out.push_back(p);
    }
    return out;
  }
  ParamRefs<Real> buffers() {
    ParamRefs<Real> out;
    for (auto& b : blocks_) {
      for (auto* p : b.bn->buffers()) out.push_back(p);
    }
    return out;
  }

 private:
  struct Block {
    std::unique_ptr<Conv1d<Real>> conv;
    std::unique_ptr<BatchNorm1d<Real>> bn;
    Relu3<Real> relu;
    MaxPool3<Real> pool;
  };

  EncoderConfig cfg_;
  std::unique_ptr<Conv1d<Real>> stem_;
  std::vector<Block> blocks_;
};

// Two-layer projection head used only during contrastive pretraining.
template <class Real>
class Projector {
 public:
  Projector(std::size_t embedding_dim, std::size_t projection_dim)
      : hidden_("projector.hidden", embedding_dim, embedding_dim),
        out_("projector.out", embedding_dim, projection_dim) {}

  void init(Rng& rng) {
    hidden_.init(rng);
    out_.init(rng);
  }

  Array2<Real> forward(const Array2<Real>& e) {
    return out_.forward(relu_.forward(hidden_.forward(e)));
  }
  Array2<Real> backward(const Array2<Real>& g) {
    return hidden_.backward(relu_.backward(out_.backward(g)));
  }
  ParamRefs<Real> params() {
    ParamRefs<Real> out = hidden_.params();
    for (auto* p : out_.params()) out.push_back(p);
    return out;
  }

 private:
  Linear<Real> hidden_;
  Relu2<Real> relu_;
  Linear<Real> out_;
};

// embedding -> 256 -> 64 -> 1, batch-norm + ReLU between layers, sigmoid
// head; emits the probability that an embedding came from the noisy target
// domain.
template <class Real>
class DomainClassifier {
 public:
  explicit DomainClassifier(std::size_t embedding_dim)
      : l1_("dc.l1", embedding_dim, 256), bn1_("dc.bn1", 256),
        l2_("dc.l2", 256, 64), bn2_("dc.bn2", 64), l3_("dc.l3", 64, 1) {}

  void init(Rng& rng) {
    l1_.init(rng);
    l2_.init(rng);
    l3_.init(rng);
  }

  Array2<Real> forward(const Array2<Real>& e, bool train) {
    Array2<Real> h = relu1_.forward(bn1_.forward(l1_.forward(e), train));
    h = relu2_.forward(bn2_.forward(l2_.forward(h), train));
    return head_.forward(l3_.forward(h));
  }
  Array2<Real> backward(const Array2<Real>& g) {
    Array2<Real> h = l3_.backward(head_.backward(g));
    h = l2_.backward(bn2_.backward(relu2_.backward(h)));
    return l1_.backward(bn1_.backward(relu1_.backward(h)));
  }
  ParamRefs<Real> params() {
    ParamRefs<Real> out = l1_.params();
    for (auto* p : bn1_.params()) out.push_back(p);
    for (auto* p : l2_.params()) out.push_back(p);
    for (auto* p : bn2_.params()) out.push_back(p);
    for (auto* p : l3_.params()) out.push_back(p);
    return out;
  }
  ParamRefs<Real> buffers() {
    ParamRefs<Real> out = bn1_.buffers();
    for (auto* p : bn2_.buffers()) out.push_back(p);
    return out;
  }

 private:
  Linear<Real> l1_;
  BatchNormDense<Real> bn1_;
  Relu2<Real> relu1_;
  Linear<Real> l2_;
  BatchNormDense<Real> bn2_;
  Relu2<Real> relu2_;
  Linear<Real> l3_;
  SigmoidHead<Real> head_;
};

// embedding -> embedding/2 -> n_tags, ReLU in between, raw logits out.
template <class Real>
class LabelPredictor {
 public:
  LabelPredictor(std::size_t embedding_dim, std::size_t n_tags)
      : l1_("lp.l1", embedding_dim, embedding_dim / 2),
        l2_("lp.l2", embedding_dim / 2, n_tags) {}

  void init(Rng& rng) {
    l1_.init(rng);
    l2_.init(rng);
  }

  Array2<Real> forward(const Array2<Real>& e) {
    return l2_.forward(relu_.forward(l1_.forward(e)));
  }
  Array2<Real> backward(const Array2<Real>& g) {
    return l1_.backward(relu_.backward(l2_.backward(g)));
  }
  ParamRefs<Real> params() {
    ParamRefs<Real> out = l1_.params();
    for (auto* p : l2_.params()) out.push_back(p);
    return out;
  }

 private:
  Linear<Real> l1_;
  Relu2<Real> relu_;
  Linear<Real> l2_;
};

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t projection_dim = 0;  // 0 -> embedding_dim / 4
  std::size_t n_tags = 50;

  std::size_t resolved_projection_dim() const {
    return projection_dim > 0 ? projection_dim
                              : static_cast<std::size_t>(encoder.embedding_dim) / 4;
  }
};

template <class Real>
struct Model {
  ModelConfig cfg;
  SampleCnnEncoder<Real> encoder;
  Projector<Real> projector;
  DomainClassifier<Real> dc;
  LabelPredictor<Real> lp;

  explicit Model(const ModelConfig& c)
      : cfg(c), encoder(c.encoder),
        projector(static_cast<std::size_t>(c.encoder.embedding_dim),
                  c.resolved_projection_dim()),
        dc(static_cast<std::size_t>(c.encoder.embedding_dim)),
        lp(static_cast<std::size_t>(c.encoder.embedding_dim), c.n_tags) {}

  // Initialization order is fixed (encoder, projector, dc, lp) so equal
  // seeds give equal parameters regardless of which stages later run.
  void init(Rng& rng) {
    encoder.init(rng);
    projector.init(rng);
    dc.init(rng);
    lp.init(rng);
  }

  // fe = encoder + projector: the collection frozen/trained as one unit.
  ParamRefs<Real> fe_params() {
    ParamRefs<Real> out = encoder.params();
    for (auto* p : projector.params()) out.push_back(p);
    return out;
  }
  ParamRefs<Real> fe_state() {
    ParamRefs<Real> out = fe_params();
    for (auto* p : encoder.buffers()) out.push_back(p);
    return out;
  }
  ParamRefs<Real> dc_params() { return dc.params(); }
  ParamRefs<Real> dc_state() {
    ParamRefs<Real> out = dc.params();
    for (auto* p : dc.buffers()) out.push_back(p);
    return out;
  }
  ParamRefs<Real> lp_params() { return lp.params(); }
};

}  // namespace noisytag
