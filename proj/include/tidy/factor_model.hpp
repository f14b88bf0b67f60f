#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidy/corpus.hpp"

namespace tidy {

/// Latent-factor model: a user's predicted rating of an item is the dot
/// product of their factor vectors.
struct FactorModel {
  int d = 0;
  double lambda = 0.0;
  double scale_min = 0.0;
  double scale_max = 1.0;
  std::vector<std::string> users;
  std::vector<PlacementItem> items;
  std::vector<double> user_factors;  // |U| x d, row-major
  std::vector<double> item_factors;  // |I| x d, row-major

  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;

  void rebuild_indices();
  int user_id(const std::string& name) const;    // throws UnknownUser
  int item_id(const PlacementItem& item) const;  // throws UnknownItem

  const double* user_row(int u) const { return &user_factors[static_cast<std::size_t>(u) * d]; }
  const double* item_row(int i) const { return &item_factors[static_cast<std::size_t>(i) * d]; }
};

struct TrainParams {
  int d = 16;
  double lambda = 0.05;
  double learning_rate = 0.05;
  int epochs = 500;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
};

struct FactorGradients {
  std::vector<double> user;  // same shape as user_factors
  std::vector<double> item;  // same shape as item_factors
};

/// Mean weighted squared error over the corpus plus lambda times the squared
/// L2 norm of all factors.
double loss(const FactorModel& model, const RatingsCorpus& corpus);

/// Exact gradient of `loss` with respect to every factor entry.
FactorGradients gradient(const FactorModel& model, const RatingsCorpus& corpus);

/// Full-batch gradient descent on the loss. Deterministic given the seed;
/// throws DivergenceDetected if the loss stops being finite.
FactorModel train(const RatingsCorpus& corpus, const TrainParams& params);

double predict_rating(const FactorModel& model, int user, int item);
double predict_rating(const FactorModel& model, const std::string& user,
                      const PlacementItem& item);

/// The k items of the object class with the highest predicted rating,
/// descending; ties break by item index ascending.
std::vector<int> top_placements(const FactorModel& model, const std::string& user,
                                const std::string& object_class, int k);

/// True iff the current (room, receptacle) pair is absent from the top-k
/// placements for the object.
bool is_misplaced(const FactorModel& model, const std::string& user,
                  const std::string& object_class, const std::string& room,
                  const std::string& receptacle_class, int k = 10);

/// Receptacle classes of items matching (object, room), best first.
std::vector<std::string> receptacle_candidates(const FactorModel& model, const std::string& user,
                                               const std::string& object_class,
                                               const std::string& room);

/// Rooms holding items of the object class, ranked by the best predicted
/// rating inside each room; ties break alphabetically. This is the
/// user-specific counterpart of the knowledge-base room choice.
std::vector<std::string> user_room_ranking(const FactorModel& model, const std::string& user,
                                           const std::string& object_class);

/// 1-based position of the current placement in the object's full ranking;
/// returns one past the item count when the placement is not an item at all.
int placement_rank(const FactorModel& model, const std::string& user,
                   const std::string& object_class, const std::string& room,
                   const std::string& receptacle_class);

/// Text serialization with hexfloat factors: bit-exact round trips.
std::string save_model(const FactorModel& model);
FactorModel load_model(const std::string& text);

}  // namespace tidy
