#include "skinlink/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace skinlink {

namespace {

// nested regions run inline on the calling worker
thread_local bool inside_region = false;

} // namespace

std::size_t worker_count()
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SKINLINK_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
        } catch (...) {
            // unparsable cap is ignored
        }
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = inside_region ? 1 : std::min(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> failed_at(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            inside_region = true;
            const std::size_t begin = n * w / workers;
            const std::size_t end = n * (w + 1) / workers;
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    failed_at[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::size_t first = workers;
    for (std::size_t w = 0; w < workers; ++w)
        if (errors[w] && (first == workers || failed_at[w] < failed_at[first])) first = w;
    if (first != workers) std::rethrow_exception(errors[first]);
}

} // namespace skinlink
