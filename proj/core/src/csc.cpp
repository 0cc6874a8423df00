#include "cogd/csc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "cogd/rng.hpp"

namespace cogd {

std::vector<double> FilterBank::l2_norms() const {
    std::vector<double> out(filters.size());
    for (std::size_t i = 0; i < filters.size(); ++i) out[i] = norm(filters[i], NormKind::L2);
    return out;
}

namespace {

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32_le(const std::vector<std::uint8_t>& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<std::uint8_t> FilterBank::serialize() const {
    static const char magic[] = "COGDFB1\n";
    std::vector<std::uint8_t> out(magic, magic + 8);
    put_u32_le(out, static_cast<std::uint32_t>(filters.size()));
    put_u32_le(out, static_cast<std::uint32_t>(k));
    for (const auto& f : filters) {
        for (double v : f) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            for (int i = 0; i < 8; ++i)
                out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
        }
    }
    return out;
}

FilterBank FilterBank::deserialize(const std::vector<std::uint8_t>& bytes) {
    static const char magic[] = "COGDFB1\n";
    if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, 8) != 0)
        throw std::runtime_error("FilterBank: bad magic");
    const std::uint32_t count = get_u32_le(bytes, 8);
    const std::uint32_t side = get_u32_le(bytes, 12);
    const std::size_t need = 16 + static_cast<std::size_t>(count) * side * side * 8;
    if (bytes.size() != need) throw std::runtime_error("FilterBank: truncated payload");
    FilterBank bank;
    bank.k = side;
    bank.filters.assign(count, std::vector<double>(static_cast<std::size_t>(side) * side));
    std::size_t off = 16;
    for (auto& f : bank.filters)
        for (double& v : f) {
            std::uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[off++]) << (8 * i);
            std::memcpy(&v, &bits, 8);
        }
    return bank;
}

void FilterBank::save(const std::string& path) const {
    auto bytes = serialize();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write filter bank: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

FilterBank FilterBank::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open filter bank: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

void soft_threshold(std::vector<double>& v, double t) {
    if (t < 0.0) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
    for (double& x : v) {
        const double mag = std::abs(x) - t;
        x = mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
    }
}

std::vector<double> soft_thresholded(const std::vector<double>& v, double t) {
    std::vector<double> out = v;
    soft_threshold(out, t);
    return out;
}

std::vector<double> project_unit_ball(const std::vector<double>& v) {
    std::vector<double> out = v;
    // The division can leave the recomputed norm one ulp above 1; repeat so
    // the result is a true fixed point (exact idempotence).
    for (double n = norm(out, NormKind::L2); n > 1.0; n = norm(out, NormKind::L2))
        for (double& x : out) x /= n;
    return out;
}

ImageGrid reconstruct(const FilterBank& bank, const CodeMaps& codes) {
    if (bank.count() != codes.maps.size())
        throw std::invalid_argument("reconstruct: bank/code count mismatch");
    if (codes.maps.empty()) throw std::invalid_argument("reconstruct: empty code maps");
    ImageGrid out(codes.maps[0].height, codes.maps[0].width, 0.0, codes.maps[0].range_max);
    for (std::size_t i = 0; i < bank.count(); ++i) {
        ImageGrid c = conv2d_circular(codes.maps[i], bank.filters[i], bank.k, bank.k);
        for (std::size_t p = 0; p < out.size(); ++p) out.pixels[p] += c.pixels[p];
    }
    return out;
}

namespace {

// Adjoint of the bank operator: per filter, circular correlation of r.
void bank_adjoint(const FilterBank& bank, const ImageGrid& r, std::vector<ImageGrid>& out) {
    out.resize(bank.count());
    for (std::size_t i = 0; i < bank.count(); ++i)
        out[i] = corr2d_circular(r, bank.filters[i], bank.k, bank.k);
}


void apply_mask(const InpaintingMask* mask, ImageGrid& img) {
    if (!mask) return;
    for (std::size_t p = 0; p < img.size(); ++p) img.pixels[p] *= mask->grid[p];
}

double flat_norm(const std::vector<ImageGrid>& maps) {
    double acc = 0.0;
    for (const auto& m : maps)
        for (double v : m.pixels) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace

double csc_objective(const FilterBank& bank, const CodeMaps& codes, const ImageGrid& image,
                     const InpaintingMask* mask, double* data_term, double* l1_term) {
    ImageGrid recon = reconstruct(bank, codes);
    double data = 0.0;
    for (std::size_t p = 0; p < image.size(); ++p) {
        const double m = mask ? mask->grid[p] : 1.0;
        const double d = image.pixels[p] - m * recon.pixels[p];
        data += (mask ? m : 1.0) * d * d;  // unobserved pixels do not count
    }
    data *= 0.5;
    double l1 = 0.0;
    for (const auto& m : codes.maps) l1 += norm(m.pixels, NormKind::L1);
    l1 *= codes.lambda;
    if (data_term) *data_term = data;
    if (l1_term) *l1_term = l1;
    return data + l1;
}

CodeMaps code_update(const FilterBank& bank, const CodeMaps& codes, const ImageGrid& image,
                     const InpaintingMask* mask, AdmmState& admm, std::int64_t inner_iters) {
    if (bank.count() != codes.maps.size())
        throw std::invalid_argument("code_update: bank/code count mismatch");
    const std::size_t n_maps = codes.maps.size();
    const std::size_t h = image.height, w = image.width;

    // z starts from the (possibly coordinated) input codes; u warm-starts
    // from the previous call when shapes agree.
    std::vector<ImageGrid> z = codes.maps;
    std::vector<ImageGrid>& u = admm.code_dual;
    if (u.size() != n_maps || u[0].height != h || u[0].width != w)
        u.assign(n_maps, ImageGrid(h, w));

    // (A^T M A + rho I) x = A^T M b + rho (z - u), solved by CG.
    auto op = [&](const std::vector<ImageGrid>& x, std::vector<ImageGrid>& out) {
        CodeMaps tmp{x, codes.lambda};
        ImageGrid ax = reconstruct(bank, tmp);
        apply_mask(mask, ax);
        bank_adjoint(bank, ax, out);
        for (std::size_t i = 0; i < n_maps; ++i)
            for (std::size_t p = 0; p < out[i].size(); ++p)
                out[i].pixels[p] += admm.rho * x[i].pixels[p];
    };

    ImageGrid mb = image;
    apply_mask(mask, mb);
    std::vector<ImageGrid> atb;
    bank_adjoint(bank, mb, atb);

    std::vector<ImageGrid> x = codes.maps;
    const double entry_cost = flat_norm(x);  // fallback marker only
    (void)entry_cost;

    std::vector<ImageGrid> rhs(n_maps), r(n_maps), p(n_maps), ap(n_maps);
    for (std::int64_t it = 0; it < inner_iters; ++it) {
        // x-step (CG)
        for (std::size_t i = 0; i < n_maps; ++i) {
            rhs[i] = atb[i];
            for (std::size_t q = 0; q < rhs[i].size(); ++q)
                rhs[i].pixels[q] += admm.rho * (z[i].pixels[q] - u[i].pixels[q]);
        }
        op(x, ap);
        for (std::size_t i = 0; i < n_maps; ++i) {
            r[i] = rhs[i];
            for (std::size_t q = 0; q < r[i].size(); ++q) r[i].pixels[q] -= ap[i].pixels[q];
        }
        p = r;
        double rs = 0.0;
        for (const auto& m : r)
            for (double v : m.pixels) rs += v * v;
        const double r0 = std::sqrt(rs);
        std::int64_t cg_it = 0;
        while (cg_it < admm.cg_max_iters && std::sqrt(rs) > admm.cg_tol * std::max(1.0, r0)) {
            op(p, ap);
            double pap = 0.0;
            for (std::size_t i = 0; i < n_maps; ++i)
                for (std::size_t q = 0; q < p[i].size(); ++q)
                    pap += p[i].pixels[q] * ap[i].pixels[q];
            if (pap <= 0.0) break;
            const double alpha = rs / pap;
            double rs_new = 0.0;
            for (std::size_t i = 0; i < n_maps; ++i)
                for (std::size_t q = 0; q < p[i].size(); ++q) {
                    x[i].pixels[q] += alpha * p[i].pixels[q];
                    r[i].pixels[q] -= alpha * ap[i].pixels[q];
                    rs_new += r[i].pixels[q] * r[i].pixels[q];
                }
            const double beta = rs_new / rs;
            rs = rs_new;
            for (std::size_t i = 0; i < n_maps; ++i)
                for (std::size_t q = 0; q < p[i].size(); ++q)
                    p[i].pixels[q] = r[i].pixels[q] + beta * p[i].pixels[q];
            ++cg_it;
        }
        admm.cg_stalled = std::sqrt(rs) > r0 && r0 > 0.0;

        // z-step + dual update
        double primal2 = 0.0, dual2 = 0.0;
        for (std::size_t i = 0; i < n_maps; ++i) {
            for (std::size_t q = 0; q < z[i].size(); ++q) {
                const double z_old = z[i].pixels[q];
                double t = x[i].pixels[q] + u[i].pixels[q];
                const double mag = std::abs(t) - codes.lambda / admm.rho;
                const double z_new = mag > 0.0 ? (t > 0.0 ? mag : -mag) : 0.0;
                z[i].pixels[q] = z_new;
                u[i].pixels[q] += x[i].pixels[q] - z_new;
                const double pr = x[i].pixels[q] - z_new;
                primal2 += pr * pr;
                const double du = admm.rho * (z_new - z_old);
                dual2 += du * du;
            }
        }
        admm.primal_residuals.push_back(std::sqrt(primal2));
        admm.dual_residuals.push_back(std::sqrt(dual2));
    }

    CodeMaps out;
    out.lambda = codes.lambda;
    out.maps = z;  // the thresholded copy is exactly sparse
    return out;
}

FilterBank kernel_update(const FilterBank& bank, const std::vector<CodeMaps>& codes,
                         const std::vector<ImageGrid>& images, AdmmState& admm,
                         std::int64_t inner_iters) {
    if (codes.size() != images.size())
        throw std::invalid_argument("kernel_update: codes/images count mismatch");
    const std::size_t nk = bank.count();
    const std::size_t ksz = bank.k * bank.k;

    auto flat = [&](const std::vector<std::vector<double>>& f) {
        std::vector<double> v;
        v.reserve(nk * ksz);
        for (const auto& fk : f) v.insert(v.end(), fk.begin(), fk.end());
        return v;
    };
    auto unflat = [&](const std::vector<double>& v) {
        std::vector<std::vector<double>> f(nk, std::vector<double>(ksz));
        for (std::size_t i = 0; i < nk; ++i)
            std::copy(v.begin() + static_cast<std::ptrdiff_t>(i * ksz),
                      v.begin() + static_cast<std::ptrdiff_t>((i + 1) * ksz), f[i].begin());
        return f;
    };

    // X a = sum_k code_k (conv) a_k ; X^T r = topleft correlations.
    auto forward = [&](const std::vector<double>& a, std::size_t img) {
        ImageGrid out(images[img].height, images[img].width);
        for (std::size_t i = 0; i < nk; ++i) {
            std::vector<double> fk(a.begin() + static_cast<std::ptrdiff_t>(i * ksz),
                                   a.begin() + static_cast<std::ptrdiff_t>((i + 1) * ksz));
            ImageGrid c = conv2d_circular(codes[img].maps[i], fk, bank.k, bank.k);
            for (std::size_t p = 0; p < out.size(); ++p) out.pixels[p] += c.pixels[p];
        }
        return out;
    };
    auto adjoint_into = [&](const ImageGrid& r, std::size_t img, std::vector<double>& out) {
        for (std::size_t i = 0; i < nk; ++i) {
            std::vector<double> g = corr2d_block(r, codes[img].maps[i], bank.k, bank.k);
            for (std::size_t q = 0; q < ksz; ++q) out[i * ksz + q] += g[q];
        }
    };
    auto op = [&](const std::vector<double>& a, std::vector<double>& out) {
        out.assign(a.size(), 0.0);
        for (std::size_t img = 0; img < images.size(); ++img) {
            ImageGrid xa = forward(a, img);
            adjoint_into(xa, img, out);
        }
        for (std::size_t q = 0; q < a.size(); ++q) out[q] += admm.rho * a[q];
    };

    std::vector<double> xtb(nk * ksz, 0.0);
    for (std::size_t img = 0; img < images.size(); ++img) adjoint_into(images[img], img, xtb);

    std::vector<double> d = flat(bank.filters);
    if (admm.kernel_dual.empty()) admm.kernel_dual.emplace_back();
    std::vector<double>& v = admm.kernel_dual[0];
    if (v.size() != nk * ksz) v.assign(nk * ksz, 0.0);
    std::vector<double> a = d;

    std::vector<double> rhs(nk * ksz), r(nk * ksz), p(nk * ksz), ap(nk * ksz);
    for (std::int64_t it = 0; it < inner_iters; ++it) {
        for (std::size_t q = 0; q < rhs.size(); ++q) rhs[q] = xtb[q] + admm.rho * (d[q] - v[q]);
        op(a, ap);
        for (std::size_t q = 0; q < r.size(); ++q) r[q] = rhs[q] - ap[q];
        p = r;
        double rs = dot(r, r);
        const double r0 = std::sqrt(rs);
        std::int64_t cg_it = 0;
        while (cg_it < admm.cg_max_iters && std::sqrt(rs) > admm.cg_tol * std::max(1.0, r0)) {
            op(p, ap);
            const double pap = dot(p, ap);
            if (pap <= 0.0) break;
            const double alpha = rs / pap;
            for (std::size_t q = 0; q < a.size(); ++q) {
                a[q] += alpha * p[q];
                r[q] -= alpha * ap[q];
            }
            const double rs_new = dot(r, r);
            const double beta = rs_new / rs;
            rs = rs_new;
            for (std::size_t q = 0; q < p.size(); ++q) p[q] = r[q] + beta * p[q];
            ++cg_it;
        }

        double primal2 = 0.0, dual2 = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            std::vector<double> t(ksz);
            for (std::size_t q = 0; q < ksz; ++q) t[q] = a[i * ksz + q] + v[i * ksz + q];
            std::vector<double> d_new = project_unit_ball(t);
            for (std::size_t q = 0; q < ksz; ++q) {
                const double du = admm.rho * (d_new[q] - d[i * ksz + q]);
                dual2 += du * du;
                d[i * ksz + q] = d_new[q];
                v[i * ksz + q] += a[i * ksz + q] - d_new[q];
                const double pr = a[i * ksz + q] - d_new[q];
                primal2 += pr * pr;
            }
        }
        admm.primal_residuals.push_back(std::sqrt(primal2));
        admm.dual_residuals.push_back(std::sqrt(dual2));
    }

    FilterBank out;
    out.k = bank.k;
    out.filters = unflat(d);  // projected copy satisfies the constraint exactly
    return out;
}

CodeMaps cogd_coordinate_codes(const FilterBank& bank, const FilterBank& bank_prev,
                               const CodeMaps& codes_next, const CodeMaps& codes_prev,
                               const ImageGrid& ghat, const CoGDConfig& cfg, double eta,
                               std::vector<bool>* fired) {
    const std::size_t nk = bank.count();
    if (codes_next.maps.size() != nk || codes_prev.maps.size() != nk ||
        bank_prev.count() != nk)
        throw std::invalid_argument("cogd_coordinate_codes: shape mismatch");

    std::vector<double> l1(nk);
    double alpha_x = 0.0;
    for (std::size_t i = 0; i < nk; ++i) {
        l1[i] = norm(codes_next.maps[i].pixels, NormKind::L1);
        alpha_x += l1[i];
    }
    alpha_x /= static_cast<double>(nk);

    std::vector<double> fnorms = bank.l2_norms();
    std::vector<double> sorted = fnorms;
    std::sort(sorted.begin(), sorted.end());
    const double alpha_a = nk % 2 == 1 ? sorted[nk / 2]
                                       : 0.5 * (sorted[nk / 2 - 1] + sorted[nk / 2]);

    double ghat_sum = 0.0;
    for (double g : ghat.pixels) ghat_sum += g;

    CodeMaps out = codes_next;
    if (fired) fired->assign(nk, false);
    if (cfg.beta_scale == 0.0) return out;

    for (std::size_t i = 0; i < nk; ++i) {
        const bool s_x = l1[i] > alpha_x;
        const bool s_a = fnorms[i] > alpha_a;
        if (s_x || !s_a) continue;
        if (fired) (*fired)[i] = true;

        // Column j of the filter's circulant block is the filter shifted to
        // position j, so sum_i ghat_i dA_ij collapses to a correlation of the
        // residual with the filter difference.
        std::vector<double> da(bank.k * bank.k);
        for (std::size_t q = 0; q < da.size(); ++q)
            da[q] = bank.filters[i][q] - bank_prev.filters[i][q];
        ImageGrid num = corr2d_circular(ghat, da, bank.k, bank.k);

        for (std::size_t q = 0; q < out.maps[i].size(); ++q) {
            const double dx = codes_next.maps[i].pixels[q] - codes_prev.maps[i].pixels[q];
            const double c = std::abs(dx) < cfg.fd_eps ? ghat_sum : num.pixels[q] / dx;
            out.maps[i].pixels[q] += cfg.beta_scale * eta * c * codes_prev.maps[i].pixels[q];
        }
    }
    return out;
}

std::string history_to_csv(const std::vector<EpochStats>& history) {
    std::string out = "epoch,objective,l1_term,data_term,detector_fired_count\n";
    for (const auto& e : history) {
        out += std::to_string(e.epoch);
        out += ',';
        out += format_double(e.objective);
        out += ',';
        out += format_double(e.l1_term);
        out += ',';
        out += format_double(e.data_term);
        out += ',';
        out += std::to_string(e.detector_fired_count);
        out += '\n';
    }
    return out;
}

LearnResult learn(const std::vector<ImageGrid>& images, const LearnOptions& opts,
                  const std::optional<CoGDConfig>& cogd,
                  const std::vector<InpaintingMask>* masks) {
    if (images.empty()) throw std::invalid_argument("learn: no images");
    if (opts.num_filters == 0) throw std::invalid_argument("learn: need at least one filter");
    if (masks && masks->size() != images.size())
        throw std::invalid_argument("learn: mask count mismatch");

    LearnResult res;
    res.bank.k = opts.filter_size;
    CounterRng rng = CounterRng(opts.seed).split("filter-init");
    res.bank.filters.resize(opts.num_filters);
    for (auto& f : res.bank.filters) {
        f.resize(opts.filter_size * opts.filter_size);
        for (double& v : f) v = rng.next_normal();
        const double n = norm(f, NormKind::L2);
        for (double& v : f) v /= n;
    }
    res.codes.assign(images.size(), CodeMaps{});
    for (std::size_t i = 0; i < images.size(); ++i) {
        res.codes[i].lambda = opts.lambda;
        res.codes[i].maps.assign(opts.num_filters,
                                 ImageGrid(images[i].height, images[i].width));
    }

    AdmmState kernel_admm;
    kernel_admm.rho = opts.rho;
    kernel_admm.cg_tol = opts.cg_tol;
    kernel_admm.cg_max_iters = opts.cg_max_iters;
    std::vector<AdmmState> code_admm(images.size(), kernel_admm);

    FilterBank bank_prev = res.bank;
    std::vector<CodeMaps> codes_prev = res.codes;
    bool have_prev = false;

    for (std::int64_t epoch = 0; epoch < opts.outer_epochs; ++epoch) {
        std::int64_t fired_count = 0;
        if (cogd && have_prev) {
            for (std::size_t i = 0; i < images.size(); ++i) {
                ImageGrid ghat = reconstruct(res.bank, res.codes[i]);
                for (std::size_t p = 0; p < ghat.size(); ++p)
                    ghat.pixels[p] -= images[i].pixels[p];
                if (masks) apply_mask(&(*masks)[i], ghat);
                std::vector<bool> fired;
                res.codes[i] = cogd_coordinate_codes(res.bank, bank_prev, res.codes[i],
                                                     codes_prev[i], ghat, *cogd,
                                                     opts.cogd_eta, &fired);
                for (bool f : fired) fired_count += f ? 1 : 0;
            }
        }

        bank_prev = res.bank;
        codes_prev = res.codes;
        have_prev = true;

        res.bank = kernel_update(res.bank, res.codes, images, kernel_admm, opts.inner_iters);
        for (std::size_t i = 0; i < images.size(); ++i)
            res.codes[i] = code_update(res.bank, res.codes[i], images[i],
                                       masks ? &(*masks)[i] : nullptr, code_admm[i],
                                       opts.inner_iters);

        EpochStats stats;
        stats.epoch = epoch;
        stats.detector_fired_count = fired_count;
        for (std::size_t i = 0; i < images.size(); ++i) {
            double data = 0.0, l1 = 0.0;
            stats.objective += csc_objective(res.bank, res.codes[i], images[i],
                                             masks ? &(*masks)[i] : nullptr, &data, &l1);
            stats.data_term += data;
            stats.l1_term += l1;
        }
        res.history.push_back(stats);
    }
    return res;
}

ImageGrid inpaint(const ImageGrid& image, const FilterBank& bank, const InpaintingMask& mask,
                  double lambda, std::int64_t inner_iters, std::int64_t repeats) {
    CodeMaps codes;
    codes.lambda = lambda;
    codes.maps.assign(bank.count(), ImageGrid(image.height, image.width));
    AdmmState admm;
    for (std::int64_t r = 0; r < repeats; ++r)
        codes = code_update(bank, codes, image, &mask, admm, inner_iters);
    return reconstruct(bank, codes);
}

}  // namespace cogd
