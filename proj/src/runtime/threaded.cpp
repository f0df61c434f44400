#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

#include "detail.hpp"
#include "premlog/runtime/coordinator.hpp"

namespace premlog::detail {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// One phase on real threads. A single mutex guards mailboxes and statuses;
/// local rounds run outside it.
class ThreadedPhase {
 public:
  ThreadedPhase(std::vector<WorkerState>& workers, const RunConfig& cfg)
      : workers_(workers), cfg_(cfg), inbox_(workers.size()) {}

  void run() {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers_.size());
    for (std::size_t w = 0; w < workers_.size(); ++w)
      threads.emplace_back([this, w, &errors] {
        try {
          worker_loop(w);
        } catch (...) {
          errors[w] = std::current_exception();
          std::lock_guard lock(mu_);
          stop_ = true;
          cv_.notify_all();
        }
      });
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] {
        if (stop_) return true;
        std::vector<WorkerStatus> statuses;
        for (const auto& w : workers_) statuses.push_back(w.status());
        return coordinator_step(statuses, in_flight_) == CoordinatorDecision::Terminate;
      });
      stop_ = true;
      cv_.notify_all();
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

 private:
  void send(std::size_t from, const VersionedUpdate& u) {
    for (std::size_t j = 0; j < workers_.size(); ++j) {
      if (j == from) continue;
      inbox_[j].push_back(u);
      ++in_flight_;
    }
    cv_.notify_all();
  }

  void worker_loop(std::size_t w) {
    WorkerState& state = workers_[w];
    std::unique_lock lock(mu_);
    for (;;) {
      const bool drained = !inbox_[w].empty();
      while (!inbox_[w].empty()) {
        VersionedUpdate u = std::move(inbox_[w].front());
        inbox_[w].pop_front();
        const bool wakes = !u.finish_notice && !u.empty();
        state.receive(std::move(u));
        --in_flight_;
        if (state.status() == WorkerStatus::Finished && wakes) {
          state.set_status(WorkerStatus::Running);
          ++state.metrics().resumes;
        }
      }
      // The coordinator re-checks quiescence whenever in_flight drops.
      if (drained) cv_.notify_all();
      if (stop_) return;
      if (state.status() == WorkerStatus::Finished) {
        cv_.wait(lock);
        continue;
      }
      if (state.staleness() > cfg_.effective_slack()) {
        auto t0 = Clock::now();
        cv_.wait(lock);
        state.metrics().wait_time += seconds_since(t0);
        continue;
      }
      if (state.has_pending() || state.inbox_has_changes()) {
        lock.unlock();
        auto t0 = Clock::now();
        VersionedUpdate u = worker_local_round(state, cfg_);
        state.metrics().compute_time += seconds_since(t0);
        lock.lock();
        send(w, u);
      } else {
        state.set_status(WorkerStatus::Finished);
        VersionedUpdate notice;
        notice.sender = w;
        notice.round = state.round();
        notice.finish_notice = true;
        send(w, notice);
      }
    }
  }

  std::vector<WorkerState>& workers_;
  const RunConfig& cfg_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::deque<VersionedUpdate>> inbox_;
  std::size_t in_flight_ = 0;
  bool stop_ = false;
};

}  // namespace

void run_threaded(std::vector<WorkerState>& workers, const RunConfig& cfg, RunResult& out) {
  auto t0 = Clock::now();
  const std::size_t strata = workers.front().shard().program.strata().size();
  for (std::size_t s = 0; s < strata; ++s) {
    for (auto& w : workers) w.begin_phase(s);
    ThreadedPhase(workers, cfg).run();
  }
  out.run_time = seconds_since(t0);
  out.terminated_cleanly = true;
}

}  // namespace premlog::detail
