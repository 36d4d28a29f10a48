#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/embedding.hpp"
#include "mfd/llm.hpp"
#include "mfd/params.hpp"

namespace mfd {

// (a.b) / (2 |a| |b|) + 1/2, in [0,1]. Throws ZeroVector.
double adjusted_cosine(std::span<const double> a, std::span<const double> b);

struct Quadruple {
  std::string id;
  std::string t_llm, t_human_like, t_rewritten, t_human;
  nlohmann::json template_hashes = nlohmann::json::object();
};

struct QuadrupleEmbeddings {
  std::vector<double> llm, human_like, rewritten, human;
};

// Pairs each LLM text with its two variants and the human text of a different
// sample (uniform under `seed`). Needs at least two samples.
std::vector<Quadruple> build_quadruples(const std::vector<std::string>& llm_texts,
                                        const std::vector<std::string>& human_texts,
                                        LlmClient& llm, std::uint64_t seed);
std::vector<QuadrupleEmbeddings> embed_quadruples(const std::vector<Quadruple>& quads,
                                                  EmbeddingProvider& provider);

std::string serialize_quadruples(const std::vector<Quadruple>& quads);
std::vector<Quadruple> parse_quadruples(std::string_view jsonl);

// d_model -> d_model (ReLU) -> d_proj, registered under `prefix`.
struct ProjectionHead {
  std::string prefix = "head";
  std::size_t d_model = 256;
  std::size_t d_proj = 128;

  static ProjectionHead create(ad::ParamStore& store, std::size_t d_model, std::size_t d_proj,
                               Rng& rng, std::string prefix = "head");
  // Unnormalized projection of each row.
  ad::Tensor project(const ad::ParamStore& store, const ad::Tensor& x) const;
  // L2-normalized projection (f_high).
  ad::Tensor features(const ad::ParamStore& store, const ad::Tensor& x) const;
};

struct PairDistances {
  std::array<double, 2> pos{};  // LLM vs human-like, LLM vs rewritten
  std::array<double, 3> neg{};  // LLM, human-like, rewritten vs human
};

PairDistances pair_distances(const QuadrupleEmbeddings& q, const ProjectionHead& head,
                             const ad::ParamStore& store);
// Identity head: distances between the raw embeddings.
PairDistances pair_distances(const QuadrupleEmbeddings& q);

// Six hinges [d_pos_k - d_neg_l + alpha]_+ summed. Throws InvalidMargin for alpha <= 0.
double twice_triplet_loss(const PairDistances& d, double alpha);
std::size_t active_hinges(const PairDistances& d, double alpha);

// Differentiable batch form: pos [n,2], neg [n,3] -> mean over rows of the six-hinge sum.
ad::Tensor twice_triplet_loss(const ad::Tensor& pos, const ad::Tensor& neg, double alpha);

// Batch distances through the head; `negatives` holds the human embedding used for each row.
struct BatchDistances {
  ad::Tensor pos, neg;
};
BatchDistances batch_distances(const ad::ParamStore& store, const ProjectionHead& head,
                               const ad::Tensor& llm, const ad::Tensor& human_like,
                               const ad::Tensor& rewritten, const ad::Tensor& negatives);

struct ContrastiveConfig {
  double alpha = 0.3;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  std::size_t step_size = 5;
  double gamma = 0.5;
  std::uint64_t seed = 42;
};

struct ContrastiveHistory {
  double initial_loss = 0;          // mean loss before any update
  std::vector<double> epoch_loss;   // mean loss over each epoch's batches
};

// Mean twice-triplet loss with AdamW + StepLR. Each row's negative is the human
// text of another in-batch sample, drawn uniformly under the seed (its own when
// the batch has a single row). Only the head's parameters are updated.
ContrastiveHistory train_contrastive(const std::vector<QuadrupleEmbeddings>& data,
                                     const ProjectionHead& head, ad::ParamStore& store,
                                     const ContrastiveConfig& config);

// Mean loss over the dataset with each row's own stored human text as the negative.
double contrastive_loss(const std::vector<QuadrupleEmbeddings>& data, const ProjectionHead& head,
                        const ad::ParamStore& store, double alpha);

std::vector<double> high_feature(std::span<const double> embedding, const ProjectionHead& head,
                                 const ad::ParamStore& store);

}  // namespace mfd
