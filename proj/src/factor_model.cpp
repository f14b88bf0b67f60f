#include "tidy/factor_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

namespace tidy {
namespace {

void check_vocabulary(const FactorModel& model, const RatingsCorpus& corpus) {
  if (model.users.size() != corpus.users.size() || model.items.size() != corpus.items.size())
    fail(ErrorCode::VocabularyMismatch, "model and corpus vocabulary sizes differ");
  for (std::size_t u = 0; u < model.users.size(); ++u)
    if (model.users[u] != corpus.users[u])
      fail(ErrorCode::VocabularyMismatch, "user vocabularies differ at index " + std::to_string(u));
  for (std::size_t i = 0; i < model.items.size(); ++i)
    if (!(model.items[i] == corpus.items[i]))
      fail(ErrorCode::VocabularyMismatch, "item vocabularies differ at index " + std::to_string(i));
}

double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

/// Predicted ratings for every item of the class, with their item indices.
std::vector<std::pair<double, int>> scored_items(const FactorModel& model, int user,
                                                 const std::string& object_class) {
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < static_cast<int>(model.items.size()); ++i)
    if (model.items[i].object_class == object_class)
      scored.emplace_back(predict_rating(model, user, i), i);
  return scored;
}

void sort_by_score(std::vector<std::pair<double, int>>& scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
}

int require_object(const FactorModel& model, const std::string& object_class) {
  for (const auto& item : model.items)
    if (item.object_class == object_class) return 0;
  fail(ErrorCode::UnknownObject, "object '" + object_class + "' is not in the model vocabulary");
}

std::string format_hex(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

void FactorModel::rebuild_indices() {
  user_index.clear();
  item_index.clear();
  for (std::size_t u = 0; u < users.size(); ++u) user_index.emplace(users[u], static_cast<int>(u));
  for (std::size_t i = 0; i < items.size(); ++i)
    item_index.emplace(items[i].key(), static_cast<int>(i));
}

int FactorModel::user_id(const std::string& name) const {
  const auto it = user_index.find(name);
  if (it == user_index.end()) fail(ErrorCode::UnknownUser, "user '" + name + "'");
  return it->second;
}

int FactorModel::item_id(const PlacementItem& item) const {
  const auto it = item_index.find(item.key());
  if (it == item_index.end()) fail(ErrorCode::UnknownItem, "item '" + item.key() + "'");
  return it->second;
}

double loss(const FactorModel& model, const RatingsCorpus& corpus) {
  check_vocabulary(model, corpus);
  double data = 0.0;
  for (const auto& e : corpus.entries) {
    const double err = e.rating - dot(model.user_row(e.user), model.item_row(e.item), model.d);
    data += e.weight * err * err;
  }
  if (!corpus.entries.empty()) data /= static_cast<double>(corpus.entries.size());
  double reg = 0.0;
  for (const double v : model.user_factors) reg += v * v;
  for (const double v : model.item_factors) reg += v * v;
  return data + model.lambda * reg;
}

FactorGradients gradient(const FactorModel& model, const RatingsCorpus& corpus) {
  check_vocabulary(model, corpus);
  FactorGradients grads;
  grads.user.assign(model.user_factors.size(), 0.0);
  grads.item.assign(model.item_factors.size(), 0.0);
  const double inv_n = corpus.entries.empty() ? 0.0 : 1.0 / corpus.entries.size();
  for (const auto& e : corpus.entries) {
    const double* gu = model.user_row(e.user);
    const double* gi = model.item_row(e.item);
    const double err = e.rating - dot(gu, gi, model.d);
    const double coeff = -2.0 * inv_n * e.weight * err;
    double* du = &grads.user[static_cast<std::size_t>(e.user) * model.d];
    double* di = &grads.item[static_cast<std::size_t>(e.item) * model.d];
    for (int k = 0; k < model.d; ++k) {
      du[k] += coeff * gi[k];
      di[k] += coeff * gu[k];
    }
  }
  for (std::size_t j = 0; j < grads.user.size(); ++j)
    grads.user[j] += 2.0 * model.lambda * model.user_factors[j];
  for (std::size_t j = 0; j < grads.item.size(); ++j)
    grads.item[j] += 2.0 * model.lambda * model.item_factors[j];
  return grads;
}

FactorModel train(const RatingsCorpus& corpus, const TrainParams& params) {
  if (corpus.entries.empty()) fail(ErrorCode::EmptyCorpus, "cannot train on an empty corpus");
  if (params.d < 1) fail(ErrorCode::ConfigError, "latent dimension must be >= 1");

  FactorModel model;
  model.d = params.d;
  model.lambda = params.lambda;
  model.scale_min = corpus.scale_min;
  model.scale_max = corpus.scale_max;
  model.users = corpus.users;
  model.items = corpus.items;
  model.rebuild_indices();

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> init(-params.init_scale, params.init_scale);
  model.user_factors.resize(model.users.size() * static_cast<std::size_t>(model.d));
  model.item_factors.resize(model.items.size() * static_cast<std::size_t>(model.d));
  for (double& v : model.user_factors) v = init(rng);
  for (double& v : model.item_factors) v = init(rng);

  const double initial_loss = loss(model, corpus);
  double final_loss = initial_loss;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const FactorGradients grads = gradient(model, corpus);
    for (std::size_t j = 0; j < model.user_factors.size(); ++j)
      model.user_factors[j] -= params.learning_rate * grads.user[j];
    for (std::size_t j = 0; j < model.item_factors.size(); ++j)
      model.item_factors[j] -= params.learning_rate * grads.item[j];
    final_loss = loss(model, corpus);
    if (!std::isfinite(final_loss))
      fail(ErrorCode::DivergenceDetected,
           "loss became non-finite at epoch " + std::to_string(epoch));
  }
  if (final_loss > initial_loss)
    fail(ErrorCode::DivergenceDetected,
         "loss rose from " + std::to_string(initial_loss) + " to " +
             std::to_string(final_loss) + "; lower the learning rate");
  return model;
}

double predict_rating(const FactorModel& model, int user, int item) {
  return dot(model.user_row(user), model.item_row(item), model.d);
}

double predict_rating(const FactorModel& model, const std::string& user,
                      const PlacementItem& item) {
  return predict_rating(model, model.user_id(user), model.item_id(item));
}

std::vector<int> top_placements(const FactorModel& model, const std::string& user,
                                const std::string& object_class, int k) {
  const int u = model.user_id(user);
  require_object(model, object_class);
  auto scored = scored_items(model, u, object_class);
  sort_by_score(scored);
  std::vector<int> out;
  for (int i = 0; i < std::min<int>(k, static_cast<int>(scored.size())); ++i)
    out.push_back(scored[i].second);
  return out;
}

bool is_misplaced(const FactorModel& model, const std::string& user,
                  const std::string& object_class, const std::string& room,
                  const std::string& receptacle_class, int k) {
  const auto top = top_placements(model, user, object_class, k);
  for (const int i : top) {
    const PlacementItem& item = model.items[i];
    if (item.room == room && item.receptacle_class == receptacle_class) return false;
  }
  return true;
}

std::vector<std::string> receptacle_candidates(const FactorModel& model, const std::string& user,
                                               const std::string& object_class,
                                               const std::string& room) {
  const int u = model.user_id(user);
  require_object(model, object_class);
  auto scored = scored_items(model, u, object_class);
  sort_by_score(scored);
  std::vector<std::string> out;
  for (const auto& [score, i] : scored)
    if (model.items[i].room == room) out.push_back(model.items[i].receptacle_class);
  return out;
}

std::vector<std::string> user_room_ranking(const FactorModel& model, const std::string& user,
                                           const std::string& object_class) {
  const int u = model.user_id(user);
  require_object(model, object_class);
  std::map<std::string, double> best;
  for (int i = 0; i < static_cast<int>(model.items.size()); ++i) {
    const PlacementItem& item = model.items[i];
    if (item.object_class != object_class) continue;
    const double f = predict_rating(model, u, i);
    const auto it = best.find(item.room);
    if (it == best.end() || f > it->second) best[item.room] = f;
  }
  std::vector<std::pair<std::string, double>> rooms(best.begin(), best.end());
  std::stable_sort(rooms.begin(), rooms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (const auto& [room, score] : rooms) out.push_back(room);
  return out;
}

int placement_rank(const FactorModel& model, const std::string& user,
                   const std::string& object_class, const std::string& room,
                   const std::string& receptacle_class) {
  const int u = model.user_id(user);
  require_object(model, object_class);
  auto scored = scored_items(model, u, object_class);
  sort_by_score(scored);
  for (std::size_t r = 0; r < scored.size(); ++r) {
    const PlacementItem& item = model.items[scored[r].second];
    if (item.room == room && item.receptacle_class == receptacle_class)
      return static_cast<int>(r + 1);
  }
  return static_cast<int>(scored.size() + 1);
}

std::string save_model(const FactorModel& model) {
  std::ostringstream out;
  out << "TIDYFM 1\n";
  out << "d " << model.d << "\n";
  out << "lambda " << format_hex(model.lambda) << "\n";
  out << "scale " << format_hex(model.scale_min) << " " << format_hex(model.scale_max) << "\n";
  out << "users " << model.users.size() << "\n";
  for (const auto& u : model.users) out << u << "\n";
  out << "items " << model.items.size() << "\n";
  for (const auto& i : model.items)
    out << i.object_class << " " << i.room << " " << i.receptacle_class << "\n";
  out << "user_factors\n";
  for (std::size_t u = 0; u < model.users.size(); ++u) {
    for (int k = 0; k < model.d; ++k)
      out << (k ? " " : "") << format_hex(model.user_factors[u * model.d + k]);
    out << "\n";
  }
  out << "item_factors\n";
  for (std::size_t i = 0; i < model.items.size(); ++i) {
    for (int k = 0; k < model.d; ++k)
      out << (k ? " " : "") << format_hex(model.item_factors[i * model.d + k]);
    out << "\n";
  }
  return out.str();
}

FactorModel load_model(const std::string& text) {
  std::istringstream in(text);
  // operator>> does not accept hexfloat tokens, so numbers go through strtod.
  auto read_double = [&in](const char* what) -> double {
    std::string tok;
    if (!(in >> tok)) fail(ErrorCode::ParseError, std::string("truncated ") + what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      fail(ErrorCode::ParseError, std::string("bad number in ") + what + ": '" + tok + "'");
    return v;
  };
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "TIDYFM" || version != 1)
    fail(ErrorCode::ParseError, "not a TIDYFM version 1 model file");
  FactorModel model;
  std::string kw;
  std::size_t n_users = 0, n_items = 0;
  if (!(in >> kw >> model.d) || kw != "d" || model.d < 1)
    fail(ErrorCode::ParseError, "bad d header");
  if (!(in >> kw) || kw != "lambda") fail(ErrorCode::ParseError, "bad lambda");
  model.lambda = read_double("lambda");
  if (!(in >> kw) || kw != "scale") fail(ErrorCode::ParseError, "bad scale");
  model.scale_min = read_double("scale");
  model.scale_max = read_double("scale");
  if (!(in >> kw >> n_users) || kw != "users") fail(ErrorCode::ParseError, "bad users header");
  model.users.resize(n_users);
  for (auto& u : model.users)
    if (!(in >> u)) fail(ErrorCode::ParseError, "truncated user list");
  if (!(in >> kw >> n_items) || kw != "items") fail(ErrorCode::ParseError, "bad items header");
  model.items.resize(n_items);
  for (auto& item : model.items)
    if (!(in >> item.object_class >> item.room >> item.receptacle_class))
      fail(ErrorCode::ParseError, "truncated item list");
  if (!(in >> kw) || kw != "user_factors") fail(ErrorCode::ParseError, "missing user_factors");
  model.user_factors.resize(n_users * static_cast<std::size_t>(model.d));
  for (auto& v : model.user_factors) v = read_double("user factors");
  if (!(in >> kw) || kw != "item_factors") fail(ErrorCode::ParseError, "missing item_factors");
  model.item_factors.resize(n_items * static_cast<std::size_t>(model.d));
  for (auto& v : model.item_factors) v = read_double("item factors");
  model.rebuild_indices();
  return model;
}

}  // namespace tidy
