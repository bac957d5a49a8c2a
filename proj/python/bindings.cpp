#include <map>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmcoal/csd.hpp"
#include "mmcoal/errors.hpp"
#include "mmcoal/io.hpp"
#include "mmcoal/is.hpp"
#include "mmcoal/oracle.hpp"
#include "mmcoal/pac.hpp"
#include "mmcoal/rates.hpp"
#include "mmcoal/simulator.hpp"

namespace py = pybind11;
using namespace mmcoal;

namespace {

using Haplotypes = std::map<std::string, int>;

SampleConfig to_config(const MutationModel& model, const Haplotypes& haps) {
    SampleConfig c;
    for (const auto& [text, count] : haps) c.add(model.parse(text), count);
    return c;
}

Haplotypes to_haplotypes(const MutationModel& model, const SampleConfig& c) {
    Haplotypes out;
    for (const auto& [h, k] : c.entries()) out[model.format(h)] = k;
    return out;
}

py::dict to_dict(const Estimate& e) {
    py::dict d;
    d["loglik"] = e.loglik;
    d["loglik_se"] = e.loglik_se;
    d["mean"] = e.mean;
    d["se"] = e.se;
    d["ess"] = e.ess;
    d["runtime_s"] = e.runtime_s;
    d["particles"] = e.particles;
    d["replicates"] = e.replicates;
    d["resampling_events"] = e.resampling_events;
    d["replicate_logliks"] = e.replicate_logliks;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Likelihood inference under multiple-merger coalescents";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<LambdaMeasure>(m, "LambdaMeasure")
        .def_static("kingman", &LambdaMeasure::kingman)
        .def_static("star", &LambdaMeasure::star)
        .def_static("eldon_wakeley", &LambdaMeasure::eldon_wakeley, py::arg("psi"))
        .def_static("beta", &LambdaMeasure::beta, py::arg("alpha"))
        .def_static("from_json", [](const std::string& text) { return parse_lambda_measure(text); })
        .def_property_readonly("kingman_mass", &LambdaMeasure::kingman_mass)
        .def("describe", &LambdaMeasure::describe)
        .def("__repr__", [](const LambdaMeasure& l) { return "LambdaMeasure(" + l.describe() + ")"; });

    py::class_<MutationModel>(m, "MutationModel")
        .def_static("symmetric_biallelic", &MutationModel::symmetric_biallelic, py::arg("loci"), py::arg("theta"))
        .def_property_readonly("theta", py::overload_cast<>(&MutationModel::theta, py::const_))
        .def_property_readonly("num_loci", &MutationModel::num_loci)
        .def("with_theta", &MutationModel::with_theta, py::arg("theta"));

    m.def("lambda_rate", [](const LambdaMeasure& l, int n, int k) { return lambda_rate(l, n, k); }, py::arg("measure"),
          py::arg("n"), py::arg("k"));
    m.def("total_coal_rate", &total_coal_rate, py::arg("measure"), py::arg("n"));

    m.def(
        "read_data",
        [](const std::string& path) {
            const auto d = read_data(path);
            return py::make_tuple(d.model, to_haplotypes(d.model, d.sample));
        },
        py::arg("path"), "Returns (model, {haplotype: count}).");

    m.def(
        "simulate",
        [](const MutationModel& model, const LambdaMeasure& measure, int n, std::uint64_t seed) {
            return to_haplotypes(model, simulate_sample(model, measure, n, seed));
        },
        py::arg("model"), py::arg("measure"), py::arg("n"), py::arg("seed") = 1);

    m.def(
        "exact_likelihood",
        [](const MutationModel& model, const LambdaMeasure& measure, const Haplotypes& haps) {
            const auto c = to_config(model, haps);
            return likelihood_of(solve_exact(model, measure, c.total()), c);
        },
        py::arg("model"), py::arg("measure"), py::arg("haplotypes"));

    m.def(
        "csd_prob",
        [](const MutationModel& model, const LambdaMeasure& measure, const std::string& kind,
           const std::string& haplotype, const Haplotypes& given, int quad_order) {
            const auto c = to_config(model, given);
            const auto rates = std::make_shared<const RateTable>(measure, std::max(c.total() + 2, 2));
            const CsdEvaluator csd(parse_csd_kind(kind), model, rates, {CsdBackend::Quadrature, quad_order, 4096});
            return csd.prob(model.parse(haplotype), c);
        },
        py::arg("model"), py::arg("measure"), py::arg("kind"), py::arg("haplotype"), py::arg("given"),
        py::arg("quad_order") = 10);

    m.def(
        "importance_sample",
        [](const MutationModel& model, const LambdaMeasure& measure, const Haplotypes& haps,
           const std::string& proposal, int particles, int replicates, std::uint64_t seed, int threads) {
            ISConfig cfg;
            cfg.proposal = parse_proposal(proposal);
            cfg.particles = particles;
            cfg.replicates = replicates;
            cfg.seed = seed;
            cfg.threads = threads;
            Estimate e;
            {
                py::gil_scoped_release release;
                e = run_is(to_config(model, haps), model, measure, cfg);
            }
            return to_dict(e);
        },
        py::arg("model"), py::arg("measure"), py::arg("haplotypes"), py::arg("proposal") = "k",
        py::arg("particles") = 1000, py::arg("replicates") = 8, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "pac",
        [](const MutationModel& model, const LambdaMeasure& measure, const Haplotypes& haps, const std::string& csd,
           int permutations, std::uint64_t seed, int threads) {
            PacOptions opt;
            opt.kind = parse_csd_kind(csd);
            opt.permutations = permutations;
            opt.seed = seed;
            opt.threads = threads;
            Estimate e;
            {
                py::gil_scoped_release release;
                e = pac_average(to_config(model, haps), model, measure, opt);
            }
            return to_dict(e);
        },
        py::arg("model"), py::arg("measure"), py::arg("haplotypes"), py::arg("csd") = "k",
        py::arg("permutations") = 1000, py::arg("seed") = 1, py::arg("threads") = 1);
}
