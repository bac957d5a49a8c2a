#include <doctest.h>

#include "mmcoal/errors.hpp"
#include "mmcoal/mutation.hpp"

using namespace mmcoal;

TEST_CASE("substitute on explicit haplotypes") {
    const auto model = MutationModel::symmetric_biallelic(4, 0.4);
    const Haplotype h = {0, 1, 1, 0};
    CHECK(substitute(model, h, 0, 1) == Haplotype{1, 1, 1, 0});
    CHECK(substitute(model, h, 1, 1) == h);
    CHECK(substitute(model, substitute(model, h, 2, 0), 2, h[2]) == h);
    CHECK_THROWS_AS(substitute(model, h, 4, 0), DomainError);
    CHECK_THROWS_AS(substitute(model, h, 0, 2), DomainError);
    const HapId id = model.encode(h);
    CHECK(model.decode(model.substitute(id, 0, 1)) == Haplotype{1, 1, 1, 0});
}

TEST_CASE("encode and parse round trip") {
    std::vector<Locus> loci = {{2, 0.1, Eigen::MatrixXd{{0, 1}, {1, 0}}},
                               {3, 0.2, Eigen::MatrixXd{{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}},
                               {2, 0.3, Eigen::MatrixXd{{0.9, 0.1}, {0.3, 0.7}}}};
    const MutationModel model(loci);
    CHECK(model.haplotype_count() == 12);
    CHECK(model.theta() == doctest::Approx(0.6));
    for (HapId h = 0; h < model.haplotype_count(); ++h) {
        CHECK(model.encode(model.decode(h)) == h);
        CHECK(model.parse(model.format(h)) == h);
    }
    CHECK(model.format(model.encode({1, 2, 0})) == "120");
    CHECK_THROWS_AS(model.parse("13"), ParseError);
    CHECK_THROWS_AS(model.parse("1x0"), ParseError);
    CHECK_THROWS_AS(model.parse("130"), ParseError);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(MutationModel({{2, 0.1, Eigen::MatrixXd{{0.5, 0.4}, {1, 0}}}}), ConfigError);
    CHECK_THROWS_AS(MutationModel({{2, -0.1, Eigen::MatrixXd{{0, 1}, {1, 0}}}}), ConfigError);
    CHECK_THROWS_AS(MutationModel({{2, 0.1, Eigen::MatrixXd{{-0.5, 1.5}, {1, 0}}}}), ConfigError);
}

TEST_CASE("MRCA distribution") {
    const auto flip = MutationModel::symmetric_biallelic(1, 0.1);
    const auto m = mrca_distribution(flip);
    CHECK(m.prob(flip, 0) == doctest::Approx(0.5));

    const auto fifteen = MutationModel::symmetric_biallelic(15, 0.1);
    const auto m15 = mrca_distribution(fifteen);
    CHECK(m15.prob(fifteen, fifteen.parse("010110100101011")) == doctest::Approx(std::pow(2.0, -15)));

    const MutationModel asym({{2, 0.2, Eigen::MatrixXd{{0.9, 0.1}, {0.3, 0.7}}}});
    const auto ma = mrca_distribution(asym);
    CHECK(ma.prob(asym, 0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ma.prob(asym, 1) == doctest::Approx(0.25).epsilon(1e-12));

    // stationarity of the mixture chain on a 3-locus model
    std::vector<Locus> loci = {{2, 0.1, Eigen::MatrixXd{{0.2, 0.8}, {0.6, 0.4}}},
                               {3, 0.4, Eigen::MatrixXd{{0.1, 0.6, 0.3}, {0.5, 0, 0.5}, {0.2, 0.2, 0.6}}},
                               {2, 0.05, Eigen::MatrixXd{{0, 1}, {1, 0}}}};
    const MutationModel model(loci);
    const auto md = mrca_distribution(model);
    double total = 0.0;
    std::vector<double> next(model.haplotype_count(), 0.0);
    for (HapId h = 0; h < model.haplotype_count(); ++h) {
        total += md.prob(model, h);
        for (std::size_t l = 0; l < model.num_loci(); ++l)
            for (int a = 0; a < model.alleles(l); ++a)
                next[model.substitute(h, l, a)] +=
                    md.prob(model, h) * model.theta(l) / model.theta() * model.transition(l, model.allele(h, l), a);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    for (HapId h = 0; h < model.haplotype_count(); ++h) CHECK(std::abs(next[h] - md.prob(model, h)) < 1e-10);

    CHECK_THROWS_AS(mrca_distribution(MutationModel({{2, 0.0, Eigen::MatrixXd{{0, 1}, {1, 0}}}})), ConfigError);
    CHECK_THROWS_AS(mrca_distribution(MutationModel({{2, 0.1, Eigen::MatrixXd{{1, 0}, {0, 1}}}})), ConfigError);
    try {
        mrca_distribution(MutationModel({{2, 0.1, Eigen::MatrixXd{{0, 1}, {1, 0}}}, {2, 0.1, Eigen::MatrixXd{{1, 0}, {0.5, 0.5}}}}));
        FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("locus 1") != std::string::npos);
    }
}

TEST_CASE("sample configurations") {
    SampleConfig c{{3, 2}, {1, 1}};
    CHECK(c.total() == 3);
    CHECK(c.distinct() == 2);
    CHECK(c.entries().front().first == 1);
    c.add(1, -1);
    CHECK(c.distinct() == 1);
    CHECK(c.count(1) == 0);
    CHECK_THROWS_AS(c.add(1, -1), DomainError);
    CHECK(c.expand() == std::vector<HapId>{3, 3});
    CHECK(c.with(5, 1).plus(SampleConfig{{3, 1}}).total() == 4);
}

TEST_CASE("mutation move enumeration") {
    const auto one = MutationModel::symmetric_biallelic(1, 0.1);
    auto moves = enumerate_mutation_moves(SampleConfig{{0, 1}}, one);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0].parent == 1);
    CHECK(moves[0].predecessor == SampleConfig{{1, 1}});

    const auto two = MutationModel::symmetric_biallelic(2, 0.1);
    moves = enumerate_mutation_moves(SampleConfig{{0, 1}}, two);
    REQUIRE(moves.size() == 2);
    CHECK(two.format(moves[0].parent) == "10");
    CHECK(two.format(moves[1].parent) == "01");

    const auto five = MutationModel::symmetric_biallelic(5, 0.1);
    const SampleConfig cfg{{0, 4}, {7, 2}, {12, 1}};
    moves = enumerate_mutation_moves(cfg, five);
    CHECK(moves.size() == 15);
    for (const auto& mv : moves) CHECK(mv.predecessor.total() == cfg.total());

    const MutationModel lazy({{2, 0.2, Eigen::MatrixXd{{0.9, 0.1}, {0.3, 0.7}}}});
    moves = enumerate_mutation_moves(SampleConfig{{0, 2}}, lazy);
    CHECK(moves.size() == 2);  // silent move included because P_00 > 0
}
