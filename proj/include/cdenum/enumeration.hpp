#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/decomposition.hpp"
#include "cdenum/distance.hpp"
#include "cdenum/neighborhood.hpp"
#include "cdenum/structure.hpp"

namespace cdenum {

/** Replays a pre-sorted answer list; used by tests and the merge op. */
class VectorTupleStream {
 public:
  explicit VectorTupleStream(std::vector<Tuple> tuples)
      : tuples_(std::move(tuples)) {}

  const Tuple* head() const {
    return index_ < tuples_.size() ? &tuples_[index_] : nullptr;
  }
  void advance() {
    if (index_ >= tuples_.size()) throw InvariantError("advance past end");
    ++index_;
  }

 private:
  std::vector<Tuple> tuples_;
  std::size_t index_ = 0;
};

/**
 * K-way merge over strictly increasing tuple streams. Each emission costs
 * at most one comparison per extra live stream; with `dedup` set, streams
 * whose heads tie with the winner are advanced together so every tuple is
 * emitted once. Streams are checked to be strictly increasing as they are
 * consumed; a violation raises InvariantError rather than emitting out of
 * order.
 */
template <typename Stream>
class MergeCursor {
 public:
  MergeCursor(std::vector<Stream> streams, bool dedup = true,
              std::uint64_t* steps = nullptr)
      : streams_(std::move(streams)),
        equal_(streams_.size(), 0),
        dedup_(dedup),
        steps_(steps) {}

  std::size_t stream_count() const { return streams_.size(); }
  const Stream& stream(std::size_t i) const { return streams_.at(i); }

  // Comparisons spent selecting the most recent emission.
  std::uint64_t last_comparisons() const { return last_comparisons_; }

  std::optional<Tuple> next() {
    last_comparisons_ = 0;
    int best = -1;
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      equal_[i] = 0;
      const Tuple* h = streams_[i].head();
      if (!h) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        equal_[i] = 1;
        continue;
      }
      ++last_comparisons_;
      if (steps_) ++*steps_;
      auto c = *h <=> *streams_[best].head();
      if (c < 0) {
        std::fill(equal_.begin(), equal_.begin() + i, 0);
        equal_[i] = 1;
        best = static_cast<int>(i);
      } else if (c == 0) {
        equal_[i] = 1;
      }
    }
    if (best < 0) return std::nullopt;
    Tuple out = *streams_[best].head();
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      if (static_cast<int>(i) != best && !(dedup_ && equal_[i])) continue;
      streams_[i].advance();
      const Tuple* nh = streams_[i].head();
      if (nh && !(*nh > out)) {
        throw InvariantError("merge input stream is not strictly increasing");
      }
    }
    return out;
  }

 private:
  std::vector<Stream> streams_;
  std::vector<char> equal_;
  bool dedup_;
  std::uint64_t* steps_;
  std::uint64_t last_comparisons_ = 0;
};

/**
 * Merge already-materialized sorted tuple lists. Reports the worst
 * per-emission comparison count through `max_comparisons` when given.
 */
inline std::vector<Tuple> merge_streams(std::vector<std::vector<Tuple>> inputs,
                                        bool dedup = true,
                                        std::uint64_t* max_comparisons = nullptr) {
  std::vector<VectorTupleStream> streams;
  streams.reserve(inputs.size());
  for (auto& in : inputs) streams.emplace_back(std::move(in));
  MergeCursor<VectorTupleStream> merge(std::move(streams), dedup);
  std::vector<Tuple> out;
  if (max_comparisons) *max_comparisons = 0;
  while (auto t = merge.next()) {
    if (max_comparisons) {
      *max_comparisons = std::max(*max_comparisons, merge.last_comparisons());
    }
    out.push_back(std::move(*t));
  }
  return out;
}

/**
 * Lazily enumerates, in increasing lexicographic order, the tuples matching
 * one (partition, type sequence) shape: every way to pick one center per
 * class from the type's bucket such that the shape's remoteness and
 * connectivity tests pass, expanded through the position sequences into
 * full answer tuples. Buckets are in domain order and later classes spin
 * fastest, so successive tuples grow strictly.
 */
class NestedStream {
 public:
  NestedStream(const DistanceIndex& ix, const TypeIndex& tix,
               const PlanEntry& entry, std::size_t sequence_index, std::uint64_t r,
               std::uint64_t* steps)
      : ix_(&ix), tix_(&tix), entry_(&entry), r_(r), steps_(steps) {
    const std::vector<TypeId>& seq = entry.sequences.at(sequence_index);
    const std::size_t m = entry.partition.classes.size();
    wheels_.resize(m);
    values_.resize(m);
    std::size_t k = 0;
    for (std::size_t c = 0; c < m; ++c) {
      wheels_[c].bucket = tix.bucket(seq[c]);
      k += entry.partition.classes[c].arity();
    }
    head_.resize(k);
    live_ = settle(0);
  }

  const Tuple* head() const { return live_ ? &head_ : nullptr; }

  void advance() {
    if (!live_) throw InvariantError("advance past end");
    ++wheels_.back().i;
    live_ = settle(wheels_.size() - 1);
  }

  bool live() const { return live_; }
  std::size_t wheel_count() const { return wheels_.size(); }
  std::uint64_t wheel_index(std::size_t c) const { return wheels_.at(c).i; }

 private:
  struct Wheel {
    std::span<const Element> bucket;
    std::size_t i = 0;
  };

  // Find the next valid full assignment, given that classes before `c` are
  // fixed and wheel c starts at its current index. Walks the odometer
  // forward: invalid candidates skip ahead, exhausted wheels carry into the
  // previous class.
  bool settle(std::size_t c) {
    while (true) {
      Wheel& w = wheels_[c];
      if (w.i >= w.bucket.size()) {
        if (c == 0) return false;
        --c;
        ++wheels_[c].i;
        continue;
      }
      if (steps_) ++*steps_;
      const PlanClass& cls = entry_->partition.classes[c];
      Element center = w.bucket[w.i];
      auto resolved = tix_->apply_position_sequence(center, cls.position_seq);
      if (!resolved.has_value()) {
        throw InvariantError("plan type sequence cannot resolve its positions");
      }
      values_[c] = std::move(*resolved);
      if (!detail::class_div_ok(values_, c, *ix_, r_, steps_)) {
        ++w.i;
        continue;
      }
      if (c + 1 == wheels_.size()) {
        detail::scatter(entry_->partition, values_, head_);
        return true;
      }
      ++c;
      wheels_[c].i = 0;
    }
  }

  const DistanceIndex* ix_;
  const TypeIndex* tix_;
  const PlanEntry* entry_;
  std::uint64_t r_;
  std::uint64_t* steps_;
  std::vector<Wheel> wheels_;
  std::vector<std::vector<Element>> values_;
  Tuple head_;
  bool live_ = false;
};

struct DelayStats {
  std::uint64_t emitted = 0;
  std::uint64_t max_delay_steps = 0;
  double mean_delay_steps = 0.0;
  std::uint64_t preprocess_steps = 0;
};

/**
 * Constant-delay enumeration over a prepared plan: one NestedStream per
 * (plan entry, type sequence), merged in lexicographic order with
 * cross-stream deduplication. Holds only cursor state — per-stream wheel
 * indices and running counters — regardless of how many answers exist.
 *
 * The Prepared bundle and the structure must outlive the cursor.
 */
class EnumerationCursor {
 public:
  explicit EnumerationCursor(const Prepared& prep)
      : steps_(std::make_unique<std::uint64_t>(0)),
        preprocess_(prep.plan.stats.total()) {
    std::vector<NestedStream> streams;
    for (const PlanEntry& entry : prep.plan.entries) {
      for (std::size_t si = 0; si < entry.sequences.size(); ++si) {
        streams.emplace_back(prep.distances, prep.types, entry, si,
                             prep.plan.radius, steps_.get());
      }
    }
    merge_.emplace(std::move(streams), /*dedup=*/true, steps_.get());
  }

  std::size_t stream_count() const { return merge_->stream_count(); }

  std::optional<Tuple> next() {
    started_ = true;
    std::optional<Tuple> t = merge_->next();
    std::uint64_t delta = *steps_ - mark_;
    mark_ = *steps_;
    if (t.has_value()) {
      ++emitted_;
      max_delay_ = std::max(max_delay_, delta);
      sum_delay_ += delta;
    }
    return t;
  }

  std::uint64_t last_comparisons() const { return merge_->last_comparisons(); }

  DelayStats delay_stats() const {
    if (!started_) {
      throw InvariantError("delay_stats requested before enumeration started");
    }
    DelayStats d;
    d.emitted = emitted_;
    d.max_delay_steps = max_delay_;
    d.mean_delay_steps =
        emitted_ ? static_cast<double>(sum_delay_) / static_cast<double>(emitted_)
                 : 0.0;
    d.preprocess_steps = preprocess_;
    return d;
  }

  // Serialized cursor state. For a fixed plan the layout — stream count,
  // wheels per stream — is fixed and every field is rendered fixed-width,
  // so the size never varies with the structure's answer count or with how
  // far enumeration has progressed.
  std::string state_snapshot() const {
    std::string out = "streams=" + fixed_width(merge_->stream_count(), 6);
    for (std::size_t i = 0; i < merge_->stream_count(); ++i) {
      const NestedStream& st = merge_->stream(i);
      out += ";s" + fixed_width(i, 6) + "=";
      out += st.live() ? '1' : '0';
      for (std::size_t c = 0; c < st.wheel_count(); ++c) {
        out += ":" + fixed_width(st.wheel_index(c), 12);
      }
    }
    out += ";emitted=" + fixed_width(emitted_, 20);
    out += ";steps=" + fixed_width(*steps_, 20);
    return out;
  }

 private:
  std::unique_ptr<std::uint64_t> steps_;  // stable address for stream counters
  std::uint64_t preprocess_ = 0;
  std::optional<MergeCursor<NestedStream>> merge_;
  bool started_ = false;
  std::uint64_t emitted_ = 0;
  std::uint64_t mark_ = 0;
  std::uint64_t max_delay_ = 0;
  std::uint64_t sum_delay_ = 0;
};

inline EnumerationCursor open_cursor(const Prepared& prep) {
  return EnumerationCursor(prep);
}

}  // namespace cdenum
