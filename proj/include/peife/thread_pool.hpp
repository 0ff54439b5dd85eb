#ifndef PEIFE_THREAD_POOL_HPP
#define PEIFE_THREAD_POOL_HPP

#include <atomic>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace peife {

struct TaskFailure : std::runtime_error {
    int task_index;
    TaskFailure(int idx, const std::string& what)
        : std::runtime_error(what), task_index(idx) {}
};

inline int default_worker_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

/// Fork-join over `n_tasks` independent tasks. Each task owns its outputs
/// exclusively, so results do not depend on worker count or scheduling.
/// If tasks fail, the failure with the lowest task index is rethrown.
template <class F>
void fork_join(int n_tasks, int workers, F&& body) {
    if (n_tasks <= 0) return;
    if (workers <= 0) workers = default_worker_count();
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_tasks));
    if (workers == 1 || n_tasks == 1) {
        for (int i = 0; i < n_tasks; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[std::size_t(i)] = std::current_exception();
            }
        }
    } else {
        std::atomic<int> next{0};
        auto run = [&] {
            for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    errors[std::size_t(i)] = std::current_exception();
                }
            }
        };
        const int spawn = std::min(workers, n_tasks) - 1;
        std::vector<std::thread> threads;
        threads.reserve(std::size_t(spawn));
        for (int t = 0; t < spawn; ++t) threads.emplace_back(run);
        run();
        for (auto& t : threads) t.join();
    }
    for (int i = 0; i < n_tasks; ++i) {
        if (errors[std::size_t(i)]) {
            try {
                std::rethrow_exception(errors[std::size_t(i)]);
            } catch (const std::exception& e) {
                throw TaskFailure(i, e.what());
            } catch (...) {
                throw TaskFailure(i, "unknown error");
            }
        }
    }
}

} // namespace peife

#endif
