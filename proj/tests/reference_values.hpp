#pragma once

// Reference values computed with mpmath at 40 significant digits, rounded to 20.

#include <array>

namespace reference {

struct Point {
    double x;
    double value;
};

inline constexpr std::array<Point, 20> k_log_gamma{{
    {0.001, 6.9071788853838536617},
    {0.01, 4.5994798780420217016},
    {0.1, 2.252712651734205902},
    {0.25, 1.2880225246980774574},
    {0.5, 0.57236494292470008707},
    {0.75, 0.20328095143129537148},
    {1.0, 0.0},
    {1.5, -0.12078223763524522235},
    {2.0, 0.0},
    {2.5, 0.28468287047291915963},
    {3.7, 1.4280723266653881292},
    {5.0, 3.1780538303479456196},
    {7.25, 7.0521854507385394449},
    {10.0, 12.801827480081469611},
    {13.5, 21.260076156244701141},
    {25.0, 54.78472939811231919},
    {50.0, 144.56574394634488601},
    {123.456, 469.6055471299294835},
    {1000.0, 5905.2204232091812118},
    {100000.0, 1051287.7089736568949},
}};

inline constexpr std::array<Point, 20> k_digamma{{
    {0.001, -1000.5755719318102797},
    {0.01, -100.56088545786867242},
    {0.1, -10.423754940411076232},
    {0.25, -4.2274535333762654081},
    {0.5, -1.9635100260214234794},
    {0.75, -1.0858608797864721696},
    {1.0, -0.57721566490153286061},
    {1.5, 0.036489973978576520559},
    {2.0, 0.42278433509846713939},
    {2.5, 0.70315664064524318723},
    {3.7, 1.1671535393615114409},
    {5.0, 1.5061176684318004727},
    {7.25, 1.9104535268837360284},
    {10.0, 2.2517525890667211076},
    {13.5, 2.5651956512749120482},
    {25.0, 3.1987425128519740085},
    {50.0, 3.901989673427892197},
    {123.456, 4.8118293238289854123},
    {1000.0, 6.9072551956488120521},
    {100000.0, 11.512920464961895087},
}};

inline constexpr std::array<Point, 20> k_trigamma{{
    {0.001, 1000001.6425331958273},
    {0.01, 10001.621213528312804},
    {0.1, 101.4332991507927477},
    {0.25, 17.197329154507110739},
    {0.5, 4.9348022005446793094},
    {0.75, 2.5418796476716064984},
    {1.0, 1.6449340668482264365},
    {1.5, 0.93480220054467930942},
    {2.0, 0.64493406684822643647},
    {2.5, 0.49035775610023486497},
    {3.7, 0.31003785767003830216},
    {5.0, 0.22132295573711532536},
    {7.25, 0.14787923315893216965},
    {10.0, 0.10516633568168574612},
    {13.5, 0.076885224601578370444},
    {25.0, 0.040810663257225579187},
    {50.0, 0.020201333226697125806},
    {123.456, 0.0081329458342781978071},
    {1000.0, 0.0010005001666666333334},
    {100000.0, 0.000010000050000166666667},
}};

struct BetaPoint {
    double x;
    double y;
    double value;
};

// ln B(x, y) at 500 digits; x is the nearest double to the printed value.
inline constexpr std::array<BetaPoint, 8> k_log_beta{{
    {0.5, 0.5, 1.1447298858494001741},
    {3.0, 4.5, -4.3874804853563454252},
    {50.0, 60.0, -76.522723353350512681},
    {1e11, 0.5, -12.091853068541301175},
    {1e31, 0.001, 6.835798747501038244},
    {0.001, 1e6, 6.8933633753253894704},
    {12.0, 1e4, -93.028374089291308407},
    {1e300, 2.0, -1381.5510557964274105},
}};

struct PredictivePoint {
    double shape;
    double rate;
    double r;
    double y;
    double value;
};

// ln of the one-step predictive density at small r, 500 digits.
inline constexpr std::array<PredictivePoint, 6> k_small_r_predictive{{
    {2.0, 2.0, 1e-3, 0.7, -8.1999808612963587318},
    {2.0, 2.0, 1e-8, 0.7, -19.712962648484867905},
    {5.0, 0.3, 1e-30, -1.3, -82.627514326376665153},
    {1.5, 40.0, 0.05, 2.0, -14.87891829326908576},
    {0.8, 1.2, 1e-30, 0.0, 6.9543149666029580468e+31},
    {3.0, 1.0, 1e-12, 1e-5, -19.971278892851972958},
}};

}  // namespace reference
