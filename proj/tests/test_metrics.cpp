#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lense/errors.hpp"
#include "lense/metrics.hpp"
#include "lense/pca.hpp"

using namespace lense;

TEST_SUITE("metrics") {
  TEST_CASE("mean and standard error") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const MeanStderr m = mean_stderr(v);
    CHECK(m.mean == 2.5);
    // sample sd = sqrt(5/3)
    CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_stderr(std::vector<double>{7.0}).std_error == 0.0);
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(pruned_fraction(25, 100) == 0.75);
  }

  TEST_CASE("csv schema round trip") {
    MetricsRow row{"ba", "mvc", "LeNSE", 20, 0.9876543210123, 0.01, 0.5, 0.75, 1.25, 42};
    std::stringstream out;
    write_metrics_csv(out, std::vector<MetricsRow>{row, row});
    std::string header;
    std::getline(out, header);
    CHECK(header == "graph,problem,method,budget,ratio,stderr,P_V,P_E,runtime_s,seed");
    out.seekg(0);
    const auto rows = read_metrics_csv(out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "LeNSE");
    CHECK(rows[0].budget == 20);
    CHECK(rows[0].ratio == doctest::Approx(row.ratio).epsilon(1e-9));
    CHECK(rows[0].p_e == 0.75);
    CHECK(rows[0].seed == 42);
    std::stringstream bad("h\na,b,c\n");
    CHECK_THROWS_AS(read_metrics_csv(bad), ParseError);
  }

  TEST_CASE("pca on a line recovers its direction") {
    Eigen::MatrixXd rows(5, 3);
    for (int i = 0; i < 5; ++i) rows.row(i) << i, 2.0 * i, -1.0 * i;
    rows(0, 0) += 1e-3;
    const Pca2 p = Pca2::fit(rows);
    CHECK(p.components.rows() == 3);
    CHECK(p.components.cols() == 2);
    const Eigen::Vector3d dir = Eigen::Vector3d(1, 2, -1).normalized();
    CHECK(std::abs(p.components.col(0).dot(dir)) == doctest::Approx(1.0).epsilon(1e-6));
    // sign: largest-magnitude entry positive
    CHECK(p.components(1, 0) > 0.0);
    const Eigen::MatrixXd y = p.project(rows);
    CHECK(y.rows() == 5);
    CHECK(y.col(0).mean() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(y(4, 0) - y(0, 0)) == doctest::Approx(4.0 * std::sqrt(6.0)).epsilon(1e-3));
  }
}
