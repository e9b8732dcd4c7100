#include "asrlab/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace asrlab::kernels {
namespace {

struct Selected {
    const Ops* ops;
    std::string_view name;
};

Selected select() {
    const char* forced = std::getenv("ASRLAB_KERNELS");
    if (forced != nullptr) {
        if (std::strcmp(forced, "scalar") == 0) return {&scalar_ops(), "scalar"};
        if (std::strcmp(forced, "avx2") == 0) {
            const Ops* v = avx2_ops();
            if (v == nullptr)
                throw std::runtime_error("ASRLAB_KERNELS=avx2 but AVX2 is unavailable");
            return {v, "avx2"};
        }
        throw std::runtime_error(std::string("unknown ASRLAB_KERNELS value: ") + forced);
    }
    if (const Ops* v = avx2_ops()) return {v, "avx2"};
    return {&scalar_ops(), "scalar"};
}

const Selected& selected() {
    static const Selected s = select();
    return s;
}

}  // namespace

const Ops& ops() { return *selected().ops; }
std::string_view active_backend() { return selected().name; }

}  // namespace asrlab::kernels
