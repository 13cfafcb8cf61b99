#include <hivecote/boss.hpp>

#include "serialization.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hivecote {

  namespace {

    std::size_t bits_per_symbol(std::size_t alphabet_size) {
      std::size_t bits = 1;
      while ((std::size_t{1} << bits) < alphabet_size) { ++bits; }
      return bits;
    }

    /// exact windows between momentary-Fourier updates, bounding accumulated rounding
    constexpr std::size_t mft_refresh = 32;

    void direct_coefficients(std::span<const double> window, std::size_t first, std::size_t count,
                             std::vector<std::complex<double>>& out) {
      const std::size_t w = window.size();
      out.assign(count, {0.0, 0.0});
      for (std::size_t c = 0; c < count; ++c) {
        const std::size_t k = first + c;
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < w; ++j) {
          const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % w) / static_cast<double>(w);
          acc += window[j] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out[c] = acc;
      }
    }

  } // namespace

  void BossParams::validate(std::size_t m) const {
    if (word_length < 2 || word_length % 2 != 0) { throw std::invalid_argument("word length must be even and >= 2"); }
    if (alphabet_size < 2) { throw std::invalid_argument("alphabet size must be >= 2"); }
    if (window_length < 2 || window_length > m) { throw std::invalid_argument("window length must be in [2, m]"); }
    if (word_length > window_length) { throw std::invalid_argument("word length cannot exceed the window length"); }
    if (word_length / 2 + (normalise ? 1 : 0) > window_length / 2 + 1) {
      throw std::invalid_argument("window too short for the requested Fourier coefficients");
    }
    if (word_length * bits_per_symbol(alphabet_size) > 64) { throw std::invalid_argument("word does not fit in 64 bits"); }
  }

  bool BossParams::valid_for(std::size_t m) const {
    try {
      validate(m);
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  }

  std::vector<double> truncated_dft(std::span<const double> window, std::size_t word_length, bool normalised) {
    const std::size_t first = normalised ? 1 : 0;
    if (word_length % 2 != 0 || word_length / 2 + first > window.size() / 2 + 1) {
      throw std::invalid_argument("window too short for the requested Fourier coefficients");
    }
    std::vector<std::complex<double>> coefficients;
    direct_coefficients(window, first, word_length / 2, coefficients);
    std::vector<double> out;
    out.reserve(word_length);
    for (const auto& z: coefficients) {
      out.push_back(z.real());
      out.push_back(z.imag());
    }
    return out;
  }

  std::vector<double> sliding_window_coefficients(std::span<const double> series, const BossParams& params) {
    params.validate(series.size());
    const std::size_t w = params.window_length;
    const std::size_t l = params.word_length;
    const std::size_t half = l / 2;
    const std::size_t first = params.normalise ? 1 : 0;
    const std::size_t windows = series.size() - w + 1;

    std::vector<std::complex<double>> rotation(half);
    for (std::size_t c = 0; c < half; ++c) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(first + c) / static_cast<double>(w);
      rotation[c] = {std::cos(angle), std::sin(angle)};
    }

    std::vector<double> out(windows * l, 0.0);
    std::vector<std::complex<double>> coeffs;
    for (std::size_t t = 0; t < windows; ++t) {
      const auto window = series.subspan(t, w);
      if (t % mft_refresh == 0) {
        direct_coefficients(window, first, half, coeffs);
      } else {
        for (std::size_t c = 0; c < half; ++c) {
          coeffs[c] = (coeffs[c] - series[t - 1] + series[t + w - 1]) * rotation[c];
        }
      }
      double scale = 1.0;
      if (params.normalise) {
        const auto [mean, sd] = mean_and_std(window);
        if (sd <= sigma_floor) { continue; }
        scale = 1.0 / sd;
      }
      double* row = out.data() + t * l;
      for (std::size_t c = 0; c < half; ++c) {
        row[2 * c] = coeffs[c].real() * scale;
        row[2 * c + 1] = coeffs[c].imag() * scale;
      }
    }
    return out;
  }

  std::size_t McbBreakpoints::symbol(std::size_t slot, double value) const {
    const auto& r = rows[slot];
    return static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), value) - r.begin());
  }

  double interpolated_quantile(std::span<const double> sorted, double q) {
    if (sorted.empty()) { throw std::invalid_argument("quantile of an empty set"); }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= sorted.size()) { return sorted.back(); }
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) { return sorted[lo]; }
    return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
  }

  McbBreakpoints fit_mcb(std::span<const std::vector<double>> coefficient_sets, const BossParams& params) {
    const std::size_t l = params.word_length;
    const std::size_t a = params.alphabet_size;
    std::size_t total = 0;
    for (const auto& set: coefficient_sets) { total += set.size() / l; }
    if (total < a) { throw std::invalid_argument("fewer windows than symbols; cannot place breakpoints"); }

    McbBreakpoints bp;
    bp.rows.assign(l, std::vector<double>(a - 1, 0.0));
    std::vector<double> values;
    values.reserve(total);
    for (std::size_t slot = 0; slot < l; ++slot) {
      values.clear();
      for (const auto& set: coefficient_sets) {
        for (std::size_t t = 0; t < set.size() / l; ++t) { values.push_back(set[t * l + slot]); }
      }
      std::sort(values.begin(), values.end());
      for (std::size_t b = 1; b < a; ++b) {
        bp.rows[slot][b - 1] = interpolated_quantile(values, static_cast<double>(b) / static_cast<double>(a));
      }
    }
    return bp;
  }

  McbBreakpoints fit_mcb(const LabeledSeriesSet& train, const BossParams& params) {
    params.validate(train.series_length());
    std::vector<std::vector<double>> sets;
    sets.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) { sets.push_back(sliding_window_coefficients(train.series(i), params)); }
    return fit_mcb(sets, params);
  }

  Word pack_word(std::span<const std::size_t> symbols, std::size_t alphabet_size) {
    const std::size_t bits = bits_per_symbol(alphabet_size);
    Word w = 0;
    for (std::size_t j = 0; j < symbols.size(); ++j) { w |= static_cast<Word>(symbols[j]) << (bits * j); }
    return w;
  }

  namespace {

    std::vector<Word> words_from_coefficients(const std::vector<double>& coefficients, const BossParams& params,
                                              const McbBreakpoints& breakpoints) {
      const std::size_t l = params.word_length;
      const std::size_t bits = bits_per_symbol(params.alphabet_size);
      std::vector<Word> words(coefficients.size() / l);
      for (std::size_t t = 0; t < words.size(); ++t) {
        Word w = 0;
        for (std::size_t slot = 0; slot < l; ++slot) {
          w |= static_cast<Word>(breakpoints.symbol(slot, coefficients[t * l + slot])) << (bits * slot);
        }
        words[t] = w;
      }
      return words;
    }

  } // namespace

  BagOfWords BagOfWords::from_sequence(std::span<const Word> words, bool numerosity_reduction) {
    std::vector<Word> kept;
    kept.reserve(words.size());
    for (std::size_t t = 0; t < words.size(); ++t) {
      if (numerosity_reduction && t > 0 && words[t] == words[t - 1]) { continue; }
      kept.push_back(words[t]);
    }
    std::sort(kept.begin(), kept.end());
    BagOfWords bag;
    for (const Word w: kept) {
      if (!bag.entries_.empty() && bag.entries_.back().first == w) {
        ++bag.entries_.back().second;
      } else {
        bag.entries_.emplace_back(w, 1U);
      }
    }
    return bag;
  }

  BagOfWords BagOfWords::from_counts(std::vector<std::pair<Word, std::uint32_t>> counts) {
    std::sort(counts.begin(), counts.end());
    BagOfWords bag;
    for (const auto& [w, c]: counts) {
      if (c == 0) { continue; }
      if (!bag.entries_.empty() && bag.entries_.back().first == w) {
        bag.entries_.back().second += c;
      } else {
        bag.entries_.emplace_back(w, c);
      }
    }
    return bag;
  }

  std::uint32_t BagOfWords::count(Word w) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<Word, std::uint32_t>{w, 0U});
    return it != entries_.end() && it->first == w ? it->second : 0U;
  }

  std::size_t BagOfWords::total() const {
    std::size_t t = 0;
    for (const auto& e: entries_) { t += e.second; }
    return t;
  }

  std::vector<Word> series_to_words(std::span<const double> series, const BossParams& params, const McbBreakpoints& breakpoints) {
    return words_from_coefficients(sliding_window_coefficients(series, params), params, breakpoints);
  }

  BagOfWords series_to_bag(std::span<const double> series, const BossParams& params, const McbBreakpoints& breakpoints) {
    return BagOfWords::from_sequence(series_to_words(series, params, breakpoints));
  }

  double boss_distance(const BagOfWords& query, const BagOfWords& reference) {
    const auto& q = query.entries();
    const auto& r = reference.entries();
    double d = 0.0;
    std::size_t j = 0;
    for (const auto& [word, count]: q) {
      while (j < r.size() && r[j].first < word) { ++j; }
      const double other = j < r.size() && r[j].first == word ? static_cast<double>(r[j].second) : 0.0;
      const double diff = static_cast<double>(count) - other;
      d += diff * diff;
    }
    return d;
  }

  BaseBoss BaseBoss::fit(const LabeledSeriesSet& train, const BossParams& params) {
    params.validate(train.series_length());
    std::vector<std::vector<double>> sets;
    sets.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) { sets.push_back(sliding_window_coefficients(train.series(i), params)); }
    BaseBoss boss;
    boss.params_ = params;
    boss.breakpoints_ = fit_mcb(sets, params);
    boss.bags_.reserve(train.size());
    for (const auto& set: sets) {
      boss.bags_.push_back(BagOfWords::from_sequence(words_from_coefficients(set, params, boss.breakpoints_)));
    }
    boss.labels_ = train.labels();
    return boss;
  }

  BagOfWords BaseBoss::transform(std::span<const double> series) const {
    return series_to_bag(series, params_, breakpoints_);
  }

  int BaseBoss::predict_bag(const BagOfWords& query, std::optional<std::size_t> exclude) const {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (std::size_t j = 0; j < bags_.size(); ++j) {
      if (exclude && *exclude == j) { continue; }
      const double d = boss_distance(query, bags_[j]);
      if (d < best) {
        best = d;
        label = labels_[j];
      }
    }
    if (label < 0) { throw std::logic_error("BOSS member has no reference bags"); }
    return label;
  }

  double BaseBoss::loo_accuracy() const {
    if (bags_.size() < 2) { return 0.0; }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < bags_.size(); ++i) { correct += predict_bag(bags_[i], i) == labels_[i] ? 1 : 0; }
    return static_cast<double>(correct) / static_cast<double>(bags_.size());
  }

  std::optional<std::size_t> EnsembleRetention::offer(double accuracy) {
    if (accuracies_.size() < capacity_) {
      accuracies_.push_back(accuracy);
      if (accuracy < min_accuracy_) {
        min_accuracy_ = accuracy;
        min_index_ = accuracies_.size() - 1;
      }
      return accuracies_.size() - 1;
    }
    if (!(accuracy > min_accuracy_)) { return std::nullopt; }
    const std::size_t slot = min_index_;
    accuracies_[slot] = accuracy;
    min_index_ = 0;
    for (std::size_t i = 1; i < accuracies_.size(); ++i) {
      if (accuracies_[i] < accuracies_[min_index_]) { min_index_ = i; }
    }
    min_accuracy_ = accuracies_[min_index_];
    return slot;
  }

  std::vector<BossParams> cboss_parameter_space(std::size_t m) {
    std::vector<BossParams> space;
    for (std::size_t w = 10; w <= m; ++w) {
      for (const std::size_t l: {16, 14, 12, 10, 8}) {
        for (const bool z: {true, false}) {
          BossParams p{l, 4, w, z};
          if (p.valid_for(m)) { space.push_back(p); }
        }
      }
    }
    return space;
  }

  CBoss::CBoss(CBossConfig config) : config_(config), retention_(config.max_ensemble_size), clock_(config.contract) {
    if (config_.max_ensemble_size < 1 || config_.max_ensemble_size > config_.parameter_samples) {
      throw std::invalid_argument("cBOSS needs 1 <= ensemble size <= parameter samples");
    }
    if (!(config_.subsample_proportion > 0.0 && config_.subsample_proportion <= 1.0)) {
      throw std::invalid_argument("cBOSS subsample proportion must be in (0, 1]");
    }
  }

  std::string CBoss::parameters() const {
    std::ostringstream s;
    s << "cBOSS,maxEnsemble," << config_.max_ensemble_size << ",samples," << config_.parameter_samples << ",subsample,"
      << config_.subsample_proportion << ",seed," << config_.seed << ",contractNanos,"
      << detail::encode_duration(config_.contract) << ",samplesDone," << samples_done_ << ",members," << members_.size();
    return s.str();
  }

  std::vector<std::size_t> CBoss::draw_subsample(const LabeledSeriesSet& train, Rng& rng) const {
    const std::size_t n = train.size();
    const auto total = std::min(n, static_cast<std::size_t>(std::ceil(config_.subsample_proportion * static_cast<double>(n) - 1e-9)));
    const auto counts = train.class_counts();
    std::vector<std::size_t> quota(counts.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      const double exact = static_cast<double>(total) * static_cast<double>(counts[c]) / static_cast<double>(n);
      quota[c] = std::min(counts[c], static_cast<std::size_t>(std::floor(exact)));
      assigned += quota[c];
      remainders.emplace_back(-(exact - std::floor(exact)), c);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k) {
      const auto c = remainders[k].second;
      if (quota[c] < counts[c]) {
        ++quota[c];
        ++assigned;
      }
    }
    std::vector<std::size_t> chosen;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(train.label(i)) == c) { members.push_back(i); }
      }
      shuffle(members, rng);
      chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

  BuildStatus CBoss::build(const LabeledSeriesSet& train, const BuildControl& control) {
    if (samples_done_ == 0 && !complete_) {
      train.require_all_classes();
      series_length_ = train.series_length();
      if (series_length_ < 10) { throw std::invalid_argument("cBOSS needs series of length >= 10"); }
      class_count_ = train.class_count();
      train_fingerprint_ = fingerprint(train);
      order_ = cboss_parameter_space(series_length_);
      Rng rng = make_rng(config_.seed, 0);
      shuffle(order_, rng);
      retention_ = EnsembleRetention(config_.max_ensemble_size);
      members_.clear();
    } else if (fingerprint(train) != train_fingerprint_) {
      throw std::invalid_argument("cBOSS resumed on a different train set");
    }
    if (complete_) { return BuildStatus::complete; }

    clock_.start();
    std::size_t added = 0;
    const std::size_t limit = std::min(config_.parameter_samples, order_.size());
    while (samples_done_ < limit && (samples_done_ == 0 || clock_.time_remaining())) {
      if (control.unit_limit && added >= *control.unit_limit) {
        clock_.stop();
        return BuildStatus::paused;
      }
      const BossParams& params = order_[samples_done_];
      Rng rng = make_rng(config_.seed, samples_done_ + 1);
      Member member;
      member.subsample = draw_subsample(train, rng);
      member.boss = BaseBoss::fit(train.subset(member.subsample), params);
      member.accuracy = member.boss.loo_accuracy();
      member.weight = std::pow(member.accuracy, 4.0);
      if (const auto slot = retention_.offer(member.accuracy)) {
        if (*slot == members_.size()) {
          members_.push_back(std::move(member));
        } else {
          members_[*slot] = std::move(member);
        }
      }
      ++samples_done_;
      ++added;
    }
    clock_.stop();
    complete_ = true;
    return BuildStatus::complete;
  }

  Probabilities CBoss::combine_votes(std::span<const int> votes) const {
    Probabilities p(class_count_, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < votes.size(); ++k) {
      p[static_cast<std::size_t>(votes[k])] += members_[k].weight;
      total += members_[k].weight;
    }
    if (total <= 0.0) { return Probabilities(class_count_, 1.0 / static_cast<double>(class_count_)); }
    for (auto& v: p) { v /= total; }
    return p;
  }

  Probabilities CBoss::predict_proba(std::span<const double> series) const {
    if (members_.empty()) { throw std::logic_error("cBOSS has not been built"); }
    require_length(series, series_length_);
    std::vector<int> votes;
    votes.reserve(members_.size());
    for (const auto& m: members_) { votes.push_back(m.boss.predict(series)); }
    return combine_votes(votes);
  }

  TrainEstimate CBoss::estimate_train(const LabeledSeriesSet& train, const EstimateOptions&) const {
    if (members_.empty()) { throw std::logic_error("cBOSS must be built before its internal estimate"); }
    if (fingerprint(train) != train_fingerprint_) { throw std::invalid_argument("cBOSS estimate requested on a different train set"); }
    const auto start = Clock::now();
    const std::size_t n = train.size();
    std::vector<std::vector<int>> votes(n, std::vector<int>(members_.size(), 0));
    for (std::size_t k = 0; k < members_.size(); ++k) {
      const auto& m = members_[k];
      std::vector<std::ptrdiff_t> position(n, -1);
      for (std::size_t p = 0; p < m.subsample.size(); ++p) { position[m.subsample[p]] = static_cast<std::ptrdiff_t>(p); }
      for (std::size_t i = 0; i < n; ++i) {
        if (position[i] >= 0) {
          const auto p = static_cast<std::size_t>(position[i]);
          votes[i][k] = m.boss.predict_bag(m.boss.bags()[p], p);
        } else {
          votes[i][k] = m.boss.predict(train.series(i));
        }
      }
    }
    TrainEstimate est;
    est.method = "internal";
    std::size_t correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      est.probabilities.push_back(combine_votes(votes[i]));
      est.predictions.push_back(argmax(est.probabilities.back()));
      correct += est.predictions.back() == train.label(i) ? 1 : 0;
    }
    est.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    est.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
    return est;
  }

  std::unique_ptr<Classifier> CBoss::fresh(std::uint64_t seed, std::optional<Duration> contract) const {
    CBossConfig c = config_;
    c.seed = seed;
    c.contract = contract;
    return std::make_unique<CBoss>(c);
  }

  void CBoss::set_contract(std::optional<Duration> contract) {
    config_.contract = contract;
    clock_.set_limit(contract);
  }

  void CBoss::save_state(std::ostream& out) const {
    cereal::PortableBinaryOutputArchive ar(out);
    ar(config_.max_ensemble_size, config_.parameter_samples, config_.subsample_proportion, config_.seed,
       detail::encode_duration(config_.contract));
    ar(order_, retention_, samples_done_, series_length_, class_count_, train_fingerprint_, complete_,
       clock_.accumulated().count());
    ar(static_cast<std::uint64_t>(members_.size()));
    for (const auto& m: members_) { ar(m.boss, m.accuracy, m.weight, m.subsample); }
  }

  void CBoss::load_state(std::istream& in) {
    detail::guarded_load([&] {
      cereal::PortableBinaryInputArchive ar(in);
      CBossConfig c;
      std::int64_t contract = -1;
      ar(c.max_ensemble_size, c.parameter_samples, c.subsample_proportion, c.seed, contract);
      c.contract = detail::decode_duration(contract);
      CBoss restored(c);
      std::int64_t elapsed = 0;
      ar(restored.order_, restored.retention_, restored.samples_done_, restored.series_length_, restored.class_count_,
         restored.train_fingerprint_, restored.complete_, elapsed);
      restored.clock_.set_elapsed(Duration(elapsed));
      std::uint64_t count = 0;
      ar(count);
      for (std::uint64_t k = 0; k < count; ++k) {
        Member m;
        ar(m.boss, m.accuracy, m.weight, m.subsample);
        restored.members_.push_back(std::move(m));
      }
      *this = std::move(restored);
    });
  }

} // namespace hivecote
