#include "fciiml/mlp.hpp"

#include "fciiml/errors.hpp"
#include "fciiml/rng.hpp"

#include <cmath>

namespace fciiml {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr std::size_t layer_size(int l)
{
    return static_cast<std::size_t>(MlpModel::kSizes[l + 1]) * (MlpModel::kSizes[l] + 1);
}

struct Activations {
    double a[MlpModel::kLayers + 1][8];
    double z[MlpModel::kLayers + 1][8];
};

void run_forward(const std::vector<double>& p, const double* x, Activations& act)
{
    constexpr auto S = MlpModel::kSizes;
    for (int i = 0; i < S[0]; ++i)
        act.a[0][i] = x[i];
    for (int l = 0; l < MlpModel::kLayers; ++l) {
        const double* W = p.data() + MlpModel::weight_offset(l);
        const double* b = p.data() + MlpModel::bias_offset(l);
        for (int o = 0; o < S[l + 1]; ++o) {
            double z = b[o];
            for (int i = 0; i < S[l]; ++i)
                z += W[o * S[l] + i] * act.a[l][i];
            act.z[l + 1][o] = z;
            act.a[l + 1][o] = l + 1 < MlpModel::kLayers ? sigmoid(z) : (z > 0.0 ? z : 0.0);
        }
    }
}

} // namespace

MlpModel::MlpModel() : params_(parameter_count(), 0.0) {}

std::size_t MlpModel::parameter_count()
{
    std::size_t n = 0;
    for (int l = 0; l < kLayers; ++l)
        n += layer_size(l);
    return n;
}

std::size_t MlpModel::weight_offset(int layer)
{
    std::size_t n = 0;
    for (int l = 0; l < layer; ++l)
        n += layer_size(l);
    return n;
}

std::size_t MlpModel::bias_offset(int layer)
{
    return weight_offset(layer) + static_cast<std::size_t>(kSizes[layer + 1]) * kSizes[layer];
}

MlpModel MlpModel::initialize(std::uint64_t seed)
{
    MlpModel m;
    m.seed = seed;
    Rng rng(seed);
    for (int l = 0; l < kLayers; ++l) {
        const double r = std::sqrt(6.0 / (kSizes[l] + kSizes[l + 1]));
        const std::size_t w0 = weight_offset(l);
        for (std::size_t k = 0; k < static_cast<std::size_t>(kSizes[l + 1]) * kSizes[l]; ++k)
            m.params_[w0 + k] = rng.uniform(-r, r);
    }
    m.params_[bias_offset(kLayers - 1)] = 1.0;
    // identity bounds until the first fit
    m.bounds.lo.fill(0.0);
    m.bounds.hi.fill(1.0);
    return m;
}

double MlpModel::forward(const double* x) const
{
    Activations act;
    run_forward(params_, x, act);
    return act.a[kLayers][0];
}

double MlpModel::forward(const std::vector<double>& x) const
{
    if (x.size() != static_cast<std::size_t>(kSizes[0]))
        throw DomainError("network input must have " + std::to_string(kSizes[0]) + " entries");
    return forward(x.data());
}

std::vector<double> MlpModel::predict(const FeatureMatrix& raw, long long* clamped) const
{
    const FeatureMatrix s = apply_bounds(raw, bounds, clamped);
    std::vector<double> out(static_cast<std::size_t>(s.rows));
    for (int r = 0; r < s.rows; ++r)
        out[r] = forward(s.row(r));
    return out;
}

LossAndGrad loss_and_grad(const MlpModel& model, const FeatureMatrix& x, const std::vector<double>& y)
{
    if (x.rows <= 0 || static_cast<std::size_t>(x.rows) != y.size())
        throw DomainError("loss_and_grad: batch is empty or sizes differ");
    constexpr auto S = MlpModel::kSizes;
    constexpr int L = MlpModel::kLayers;
    const auto& p = model.parameters();
    LossAndGrad out;
    out.grad.assign(p.size(), 0.0);
    const double inv = 1.0 / x.rows;
    Activations act;
    double delta[L + 1][8];
    for (int r = 0; r < x.rows; ++r) {
        run_forward(p, x.row(r), act);
        const double err = act.a[L][0] - y[r];
        out.mse += err * err * inv;
        delta[L][0] = act.z[L][0] > 0.0 ? 2.0 * err * inv : 0.0;
        for (int l = L - 1; l >= 0; --l) {
            double* gW = out.grad.data() + MlpModel::weight_offset(l);
            double* gb = out.grad.data() + MlpModel::bias_offset(l);
            const double* W = p.data() + MlpModel::weight_offset(l);
            for (int o = 0; o < S[l + 1]; ++o) {
                gb[o] += delta[l + 1][o];
                for (int i = 0; i < S[l]; ++i)
                    gW[o * S[l] + i] += delta[l + 1][o] * act.a[l][i];
            }
            if (l == 0)
                break;
            for (int i = 0; i < S[l]; ++i) {
                double s = 0.0;
                for (int o = 0; o < S[l + 1]; ++o)
                    s += W[o * S[l] + i] * delta[l + 1][o];
                const double a = act.a[l][i];
                delta[l][i] = s * a * (1.0 - a);
            }
        }
    }
    return out;
}

void adam_step(std::vector<double>& params, AdamState& st, const std::vector<double>& grad)
{
    if (grad.size() != params.size())
        throw DomainError("adam_step: gradient size mismatch");
    if (st.m.size() != params.size()) {
        st.m.assign(params.size(), 0.0);
        st.v.assign(params.size(), 0.0);
    }
    ++st.step;
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t k = 0; k < params.size(); ++k) {
        st.m[k] = st.beta1 * st.m[k] + (1.0 - st.beta1) * grad[k];
        st.v[k] = st.beta2 * st.v[k] + (1.0 - st.beta2) * grad[k] * grad[k];
        params[k] -= st.lr * (st.m[k] / c1) / (std::sqrt(st.v[k] / c2) + st.eps);
    }
}

std::vector<double> train(MlpModel& model, const FeatureMatrix& x, const std::vector<double>& y,
                          int epochs, double lr)
{
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(std::max(epochs, 0)));
    AdamState st(lr);
    for (int e = 0; e < epochs; ++e) {
        auto lg = loss_and_grad(model, x, y);
        if (!std::isfinite(lg.mse))
            throw NonFiniteResidual("network training loss", e);
        history.push_back(lg.mse);
        adam_step(model, st, lg.grad);
    }
    return history;
}

} // namespace fciiml
