#pragma once

// Plain-loop recomputation of the Q-network forward pass. No Eigen, no shared
// code with the library: nested vectors in, nested vectors out.

#include <array>
#include <cstddef>
#include <vector>

namespace refmlp {

struct Layer {
    std::size_t out = 0;
    std::size_t in = 0;
    std::vector<double> w;  // row-major, out x in
    std::vector<double> b;  // out
};

inline std::vector<double> affine(const Layer& l, const std::vector<double>& x) {
    std::vector<double> y(l.out, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
        double acc = l.b[r];
        for (std::size_t c = 0; c < l.in; ++c) acc += l.w[r * l.in + c] * x[c];
        y[r] = acc;
    }
    return y;
}

inline std::vector<double> relu(std::vector<double> v) {
    for (auto& x : v) {
        if (x < 0.0) x = 0.0;
    }
    return v;
}

inline std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

// Two plain hidden layers, two residual blocks of two layers each, then the
// linear head. Shortcut adds the block input to the activated block output.
inline std::vector<double> forward(const std::array<Layer, 7>& L, const std::vector<double>& x) {
    const auto h0 = relu(affine(L[0], x));
    const auto h1 = relu(affine(L[1], h0));
    const auto a3 = relu(affine(L[3], relu(affine(L[2], h1))));
    const auto h2 = add(h1, a3);
    const auto a5 = relu(affine(L[5], relu(affine(L[4], h2))));
    const auto h3 = add(h2, a5);
    return affine(L[6], h3);
}

}  // namespace refmlp
