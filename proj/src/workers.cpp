#include "chern/workers.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace chern {

namespace {

std::atomic<int> configured{0};

int from_environment() {
    if (const char* env = std::getenv("CHERN_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

void set_worker_count(int workers) { configured.store(workers > 0 ? workers : 0); }

int worker_count() {
    const int n = configured.load();
    return n > 0 ? n : from_environment();
}

}  // namespace chern
