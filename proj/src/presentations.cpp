#include "qsl2r/ncpoly.hpp"

namespace qsl2r {

namespace {

// t = [[a]] = va - va^-1, q = u^2.
const char* kUqsu2 = R"(name UQSU2
generators f kinv k e
weights 1 1 1 1
[rules]
e*f -> f*e + (u^2 - u^-2)^-1*k - (u^2 - u^-2)^-1*kinv
e*k -> u^-4*k*e
e*kinv -> u^4*kinv*e
k*f -> u^-4*f*k
kinv*f -> u^4*f*kinv
k*kinv -> 1
kinv*k -> 1
[star]
f -> kinv*e
kinv -> kinv
k -> k
e -> f*k
[coproduct]
f -> f | kinv
f -> 1 | f
kinv -> kinv | kinv
k -> k | k
e -> e | 1
e -> k | e
[counit]
f -> 0
kinv -> 1
k -> 1
e -> 0
[antipode]
f -> -f*k
kinv -> k
k -> kinv
e -> -kinv*e
[end]
)";

// Generator order alpha < delta < beta < gamma with alpha, delta of weight 2
// so that alpha*delta -> 1 + q beta*gamma decreases.
const char* kOqsu2 = R"(name OQSU2
generators alpha delta beta gamma
weights 2 2 1 1
[rules]
beta*alpha -> u^-2*alpha*beta
gamma*alpha -> u^-2*alpha*gamma
gamma*beta -> beta*gamma
beta*delta -> u^2*delta*beta
gamma*delta -> u^2*delta*gamma
delta*alpha -> 1 + u^-2*beta*gamma
alpha*delta -> 1 + u^2*beta*gamma
[star]
alpha -> delta
delta -> alpha
beta -> -u^2*gamma
gamma -> -u^-2*beta
[coproduct]
alpha -> alpha | alpha
alpha -> beta | gamma
delta -> gamma | beta
delta -> delta | delta
beta -> alpha | beta
beta -> beta | delta
gamma -> gamma | alpha
gamma -> delta | gamma
[counit]
alpha -> 1
delta -> 1
beta -> 0
gamma -> 0
[antipode]
alpha -> delta
delta -> alpha
beta -> -u^-2*beta
gamma -> -u^2*gamma
[end]
)";

// Z is the largest letter: X^m Z^k and Y^m Z^k are the normal words.
const char* kPodles = R"(name PODLES
generators X Y Z
weights 2 2 1
[rules]
Z*X -> u^-4*X*Z
Z*Y -> u^4*Y*Z
X*Y -> 1 - u^2*(va - va^-1)*Z - u^4*Z^2
Y*X -> 1 - u^-2*(va - va^-1)*Z - u^-4*Z^2
[star]
X -> Y
Y -> X
Z -> Z
[end]
)";

const char* kQsl2r = R"(name QSL2R
generators X Y Z B
weights 2 2 1 2
[rules]
Z*X -> u^-4*X*Z
Z*Y -> u^4*Y*Z
X*Y -> 1 - u^2*(va - va^-1)*Z - u^4*Z^2
Y*X -> 1 - u^-2*(va - va^-1)*Z - u^-4*Z^2
B*X -> u^4*X*B + u^2*(u^2 + u^-2)*Z + u^2*(va - va^-1)
B*Y -> u^-4*Y*B + u^-2*(u^-2 + u^2)*Z + u^-2*(va - va^-1)
B*Z -> Z*B - X - Y
[star]
X -> Y
Y -> X
Z -> Z
B -> -B
[end]
)";

}  // namespace

std::shared_ptr<Presentation> make_uqsu2() { return Presentation::load(kUqsu2); }
std::shared_ptr<Presentation> make_oqsu2() { return Presentation::load(kOqsu2); }
std::shared_ptr<Presentation> make_podles() { return Presentation::load(kPodles); }
std::shared_ptr<Presentation> make_qsl2r() { return Presentation::load(kQsl2r); }

NCPoly make_bt(const PresentationPtr& uq) {
  return uq->parse("u^-1*(e - f*k) - i*(u^2 - u^-2)^-1*(va - va^-1)*k");
}

EtImages build_et(const PresentationPtr& oq) {
  NCPoly U[2][2] = {{oq->gen("alpha"), oq->gen("beta")}, {oq->gen("gamma"), oq->gen("delta")}};
  NCPoly Us[2][2];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) Us[r][c] = U[c][r].star();
  Scalar L[2][2] = {{Scalar(0), Scalar::i()}, {-Scalar::i(), -t_scalar()}};
  NCPoly E[2][2];
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      NCPoly acc = oq->scalar(Scalar(0));
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          if (!L[k][l].is_zero()) acc = acc + L[k][l] * (Us[r][k] * U[l][c]);
      E[r][c] = acc;
    }
  EtImages out;
  out.E11 = E[0][0];
  out.E12 = E[0][1];
  out.E21 = E[1][0];
  out.E22 = E[1][1];
  out.X = E[1][0];
  out.Y = E[0][1];
  out.Z = q_scalar(1) * E[0][0];
  return out;
}

}  // namespace qsl2r
