#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "mertens/engine.hpp"
#include "mertens/errors.hpp"
#include "mertens/explicit_formula.hpp"
#include "mertens/fastdiv.hpp"
#include "mertens/parallel.hpp"
#include "mertens/quasiperiod.hpp"
#include "mertens/scanner.hpp"
#include "mertens/sieve.hpp"
#include "mertens/zeros.hpp"

namespace py = pybind11;
using namespace mertens;

namespace {

// Python ints cross the boundary as decimal strings; u128 has no native caster.
u128 to_u128(const py::int_& v) {
    if (v < py::int_(0)) throw PreconditionError("expected a non-negative integer");
    return parse_u128(py::str(v).cast<std::string>());
}

EngineConfig make_config(u64 memory_budget, u64 u, double u_alpha, bool naive_sieve) {
    EngineConfig cfg;
    if (memory_budget) cfg.memory_budget = memory_budget;
    cfg.u = u;
    cfg.u_alpha = u_alpha;
    cfg.sieve = naive_sieve ? MoebiusSieve::Strategy::naive : MoebiusSieve::Strategy::logprime;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact Mertens function values and the explicit-formula approximation";

    auto error = py::register_exception<Error>(m, "MertensError", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<PrecisionError>(m, "PrecisionError", error.ptr());
    py::register_exception<ResourceLimitError>(m, "ResourceLimitError", error.ptr());
    py::register_exception<NotFoundError>(m, "NotFoundError", error.ptr());

    m.def("set_workers", &set_worker_count, py::arg("workers"), "Worker threads; 0 uses every core.");

    m.def(
        "mertens",
        [](const py::int_& n, u64 memory_budget, u64 u, double u_alpha, bool naive_sieve) {
            const EngineConfig cfg = make_config(memory_budget, u, u_alpha, naive_sieve);
            const u128 target = to_u128(n);
            py::gil_scoped_release release;
            return mertens_exact(target, cfg).value;
        },
        py::arg("n"), py::arg("memory_budget") = 0, py::arg("u") = 0, py::arg("u_alpha") = 1.0,
        py::arg("naive_sieve") = false, "Exact M(n).");

    m.def(
        "mertens_quotients",
        [](const py::int_& n, u64 memory_budget) {
            const EngineConfig cfg = make_config(memory_budget, 0, 1.0, false);
            const u128 target = to_u128(n);
            MertensResult r;
            {
                py::gil_scoped_release release;
                r = mertens_exact(target, cfg);
            }
            return r.by_index;
        },
        py::arg("n"), py::arg("memory_budget") = 0,
        "[M(n // 1), M(n // 2), ..., M(n // K)] from one run.");

    m.def(
        "mertens_many",
        [](const std::vector<py::int_>& ns, u64 memory_budget) {
            std::vector<u128> targets;
            for (const auto& n : ns) targets.push_back(to_u128(n));
            const EngineConfig cfg = make_config(memory_budget, 0, 1.0, false);
            std::vector<i64> out;
            {
                py::gil_scoped_release release;
                for (const MertensResult& r : mertens_many(targets, cfg)) out.push_back(r.value);
            }
            return out;
        },
        py::arg("ns"), py::arg("memory_budget") = 0, "Exact M at several n from one sieve pass.");

    m.def("mertens_naive", [](u64 n) { return mertens_naive(n); }, py::arg("n"), "M(n) by plain sieving.");

    m.def(
        "moebius",
        [](const py::int_& y1, const py::int_& y2, bool naive_sieve) {
            const u128 a = to_u128(y1), b = to_u128(y2);
            const MoebiusSieve sieve(b, naive_sieve ? MoebiusSieve::Strategy::naive : MoebiusSieve::Strategy::logprime);
            const MoebiusBlock blk = sieve.sieve(a, b);
            return std::vector<int>(blk.mu.begin(), blk.mu.end());
        },
        py::arg("y1"), py::arg("y2"), py::arg("naive_sieve") = false, "mu(y) for y1 <= y <= y2.");

    m.def(
        "fast_div",
        [](u64 n, u64 d) {
            if (d == 0) throw PreconditionError("division by zero");
            return fast_div(n, precompute_divisor(d));
        },
        py::arg("n"), py::arg("d"), "n // d through a precomputed reciprocal.");

    py::class_<ZeroTable>(m, "ZeroTable")
        .def_static("load", py::overload_cast<const std::string&>(&load_table), py::arg("path"))
        .def_static("parse", &parse_table, py::arg("text"))
        .def("save", py::overload_cast<const std::string&, const ZeroTable&>(&save_table), py::arg("path"))
        .def("__len__", &ZeroTable::size)
        .def_readonly("source", &ZeroTable::source)
        .def_property_readonly("z", [](const ZeroTable& t) {
            std::vector<double> v;
            for (const auto& e : t.entries) v.push_back(e.z);
            return v;
        })
        .def_property_readonly("a", [](const ZeroTable& t) {
            std::vector<double> v;
            for (const auto& e : t.entries) v.push_back(e.a);
            return v;
        })
        .def_property_readonly("b", [](const ZeroTable& t) {
            std::vector<double> v;
            for (const auto& e : t.entries) v.push_back(e.b);
            return v;
        });

    m.def(
        "rebased_phases",
        [](const ZeroTable& t, const std::string& x0) { return rebase(t, x0).b; }, py::arg("table"), py::arg("x0"),
        "Phases (b + z x0) mod 2pi in [-pi, pi) from the decimal masters.");

    m.def("q", &q_at, py::arg("table"), py::arg("terms"), py::arg("ln_x"),
          "2 sum a_i cos(z_i ln x + b_i) over the first `terms` zeros; ln_x is a decimal string.");
    m.def(
        "q_grid",
        [](const ZeroTable& t, std::size_t terms, const std::string& ln_start, double step, std::size_t count) {
            const ShiftedTable shifted = rebase(t, ln_start);
            return q_batch(shifted, terms, 0.0, step, count);
        },
        py::arg("table"), py::arg("terms"), py::arg("ln_start"), py::arg("step"), py::arg("count"));
    m.def("q_sigma", &q_sigma, py::arg("table"), py::arg("terms"));

    m.def(
        "crossing_probability",
        [](u64 a, u64 b, i64 ma, i64 mb, i64 m0, double sigma) {
            return crossing_probability({a, b, ma, mb, m0, sigma});
        },
        py::arg("a"), py::arg("b"), py::arg("ma"), py::arg("mb"), py::arg("m0"), py::arg("sigma") = squarefree_density);

    py::class_<QuasiPeriod>(m, "QuasiPeriod")
        .def_readonly("m", &QuasiPeriod::m)
        .def_readonly("period_ln", &QuasiPeriod::period_ln)
        .def_readonly("residuals", &QuasiPeriod::residuals)
        .def("max_residual", &QuasiPeriod::max_residual);
    m.def("quasiperiod_at", &quasiperiod_at, py::arg("table"), py::arg("k_lo"), py::arg("k_hi"), py::arg("m"));
    m.def("find_quasiperiod", &find_quasiperiod, py::arg("table"), py::arg("k_lo"), py::arg("k_hi"), py::arg("m_max"),
          py::arg("tol") = 0.01);

    m.def(
        "threshold_scan",
        [](const ZeroTable& t, const std::string& ln_start, double step, u64 count, std::size_t head_terms,
           double head_threshold, std::size_t full_terms, double full_threshold) {
            ScanConfig cfg;
            cfg.ln_start = ln_start;
            cfg.step = step;
            cfg.count = count;
            cfg.n_b = head_terms;
            cfg.n_a = std::min(cfg.n_a, head_terms);
            cfg.t_head = head_threshold;
            cfg.n_full = full_terms;
            cfg.t_full = full_threshold;
            ScanResult r;
            {
                py::gil_scoped_release release;
                r = threshold_scan(t, cfg);
            }
            py::list hits;
            for (const ScanHit& h : r.hits) hits.append(py::make_tuple(h.index, h.ln_x, h.q_head, h.q_full));
            py::dict out;
            out["flags"] = r.flags.set_positions();
            out["hits"] = hits;
            return out;
        },
        py::arg("table"), py::arg("ln_start"), py::arg("step"), py::arg("count"), py::arg("head_terms") = 7,
        py::arg("head_threshold") = 0.425, py::arg("full_terms") = 0, py::arg("full_threshold") = 0.9,
        "Flagged indices (|q_head| >= head_threshold) and (index, ln_x, q_head, q_full) hits.");

    m.attr("squarefree_density") = squarefree_density;
}
