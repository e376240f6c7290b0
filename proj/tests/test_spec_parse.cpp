#include <gtest/gtest.h>

#include "condent/errors.hpp"
#include "condent/spec_parse.hpp"

using namespace condent;

TEST(SpecParse, Distributions) {
    const auto g = parse_distribution("gaussian:mu=0,var=1");
    EXPECT_EQ(g.name(), "gaussian");
    EXPECT_EQ(g.mean(), 0.0);
    EXPECT_EQ(g.variance(), 1.0);
    EXPECT_EQ(parse_distribution(" gm2:var=2 ").variance(), 2.0);
    const auto b = parse_distribution("betaprime:alpha=6,gamma=3");
    EXPECT_EQ(b.spec(), "betaprime:alpha=6,gamma=3");
    for (const auto& n : catalog_names()) {
        const auto d = make_catalog(n, n == "gm2" ? 2.5 : 0.7);
        EXPECT_EQ(parse_distribution(d.spec()).spec(), d.spec()) << n;
    }
    EXPECT_EQ(parse_distribution("gaussian:var=4").mean(), 0.0);
}

TEST(SpecParse, RoundTripIsExact) {
    const double v = 0.1 + 0.2;  // not representable in few digits
    const auto d = make_laplace(v);
    EXPECT_EQ(parse_distribution(d.spec()).variance(), v);
    const auto a = make_affine(make_gaussian(0.3, 1.7), -2.5, 1.0 / 3.0);
    const auto p = parse_distribution(a.spec());
    EXPECT_EQ(p.spec(), a.spec());
    EXPECT_EQ(p.mean(), a.mean());
}

TEST(SpecParse, DistributionErrors) {
    EXPECT_THROW(parse_distribution("gaussian:mu=0,var=1,foo=2"), ParseError);
    EXPECT_THROW(parse_distribution("gaussian:var=1,var=2"), ParseError);
    EXPECT_THROW(parse_distribution("gaussian:mu=0"), ParseError);
    EXPECT_THROW(parse_distribution("cauchy:var=1"), ParseError);
    EXPECT_THROW(parse_distribution("laplace:var=1x"), ParseError);
    EXPECT_THROW(parse_distribution("laplace:var=inf"), ParseError);
    EXPECT_THROW(parse_distribution("laplace"), ParseError);
    EXPECT_THROW(parse_distribution("uniform:var="), ParseError);
    EXPECT_THROW(parse_distribution("affine(scale=2,)"), ParseError);
    // parses, but the constructor rejects it
    EXPECT_THROW(parse_distribution("uniform:var=-1"), ParameterError);
    EXPECT_THROW(parse_distribution("gm2:var=0.5"), ParameterError);
}

TEST(SpecParse, Families) {
    const auto f = parse_family("gamma:alpha=7");
    EXPECT_EQ(f.gamma_shape, 7.0);
    EXPECT_EQ(f.tag, "gamma:alpha=7");
    EXPECT_EQ(parse_family(f.tag).tag, f.tag);
    EXPECT_EQ(parse_family("gaussian-base:var=0.5").tag, "gaussian-base:var=0.5");
    EXPECT_THROW(parse_family("gamma:shape=7"), ParseError);
    EXPECT_THROW(parse_family("poisson:rate=1"), ParseError);
}

TEST(SpecParse, Grids) {
    EXPECT_EQ(parse_grid("1.25,1.5,2"), (std::vector<double>{1.25, 1.5, 2}));
    const auto g = parse_grid("0:1:5");
    ASSERT_EQ(g.size(), 5u);
    EXPECT_EQ(g[2], 0.5);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_EQ(parse_grid("3:3:1"), std::vector<double>{3.0});
    EXPECT_THROW(parse_grid("2,1"), ParseError);
    EXPECT_THROW(parse_grid("1,1"), ParseError);
    EXPECT_THROW(parse_grid("0:1:0"), ParseError);
    EXPECT_THROW(parse_grid("0:1:2.5"), ParseError);
    EXPECT_THROW(parse_grid(""), ParseError);
    EXPECT_THROW(parse_grid("1:2"), ParseError);
}

TEST(SpecParse, Matrices) {
    const Mat m = parse_matrix("[[1,2],[3,4.5]]");
    EXPECT_EQ(m(1, 1), 4.5);
    EXPECT_EQ(m(0, 1), 2.0);
    EXPECT_EQ(parse_vector("[1,-2,3e-1]")[2], 0.3);
    EXPECT_THROW(parse_matrix("[[1,2],[3]]"), ParseError);
    EXPECT_THROW(parse_matrix("[[1,\"a\"],[3,4]]"), ParseError);
    EXPECT_THROW(parse_matrix("[[1,2],[3,4]"), ParseError);
    EXPECT_THROW(parse_matrix("[]"), ParseError);
    EXPECT_THROW(parse_vector("[[1]]"), ParseError);
}

TEST(SpecParse, VectorChannel) {
    const auto ch = parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1),A=[[1,0],[0,1]],Kw=[[1,0],[0,1]]");
    EXPECT_EQ(ch.dim(), 2);
    EXPECT_EQ(ch.input().factors()[0].name(), "uniform");
    EXPECT_EQ(ch.input().factors()[1].name(), "laplace");
    EXPECT_TRUE(ch.A().isIdentity(0.0));
    EXPECT_EQ(parse_vector_channel(ch.spec()).spec(), ch.spec());

    const auto g = parse_vector_channel("vec:n=2,input=gauss(mean=[1,2],cov=[[2,0.5],[0.5,1]]),A=[[2,1],[0,1]],Kw=[[1,0.2],[0.2,1]]");
    EXPECT_TRUE(g.input().is_gaussian());
    EXPECT_EQ(g.input().mean()[1], 2.0);
    EXPECT_NEAR(g.input().cov()(0, 1), 0.5, 1e-15);
    EXPECT_EQ(g.K_W()(1, 0), 0.2);

    const auto c = VectorChannel(VectorInput::correlated_gm2(2.0, 0.5, parse_matrix("[[1,0],[0.6,0.8]]")),
                                 Mat::Identity(2, 2), Mat::Identity(2, 2));
    const auto back = parse_vector_channel(c.spec());
    EXPECT_EQ(back.spec(), c.spec());
    EXPECT_EQ(back.input().cov(), c.input().cov());

    const auto three = parse_vector_channel("vec:n=3,input=prod(uniform:var=1;uniform:var=2;laplace:var=1)");
    EXPECT_EQ(three.dim(), 3);
    EXPECT_TRUE(three.K_W().isIdentity(0.0));
}

TEST(SpecParse, VectorChannelErrors) {
    EXPECT_THROW(parse_vector_channel("vec:n=3,input=prod(uniform:var=1;laplace:var=1)"), ParseError);
    EXPECT_THROW(parse_vector_channel("vec:input=prod(uniform:var=1;laplace:var=1)"), ParseError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1),B=[[1]]"), ParseError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1"), ParseError);
    EXPECT_THROW(parse_vector_channel("vector:n=2,input=prod(uniform:var=1;laplace:var=1)"), ParseError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=mix(uniform:var=1;laplace:var=1)"), ParseError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1),A=[[1,2],[2,4]]"), ParameterError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1),Kw=[[1,0],[0,-1]]"), ParameterError);
    EXPECT_THROW(parse_vector_channel("vec:n=2,input=prod(uniform:var=1;laplace:var=1),A=[[1,0,0],[0,1,0]]"), ParameterError);
}
