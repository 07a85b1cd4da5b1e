"""The ten built-in problems.

Each factory returns a ProblemSpec whose operators, bases, reduced right
sides and closed forms are written in the operator language of
doc/operator_syntax.md. Where a reference closed form disagrees with its own
reduced system, the encoded form is the one the residual confirms.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional

from .errors import UnknownExample
from .spec import CAPUTO, PRIMARY_SUBSPACE, RIEMANN_LIOUVILLE, SERIES_SOLUTION
from .types import ClassicalLimit, NIMSpec, ParamDecl, ProblemSpec, SubspaceSpec

ONE = Fraction(1)


def _order(name: str, value, low=0, high=1, low_open: bool = True, high_open: bool = False,
           exclude: Iterable = (), text: str = "") -> ParamDecl:
    return ParamDecl(name=name, value=Fraction(value), low=Fraction(low), high=Fraction(high), low_open=low_open,
                     high_open=high_open, exclude=[Fraction(e) for e in exclude], order=True, range_text=text)


def _scalar(name: str, value, exclude: Iterable = (), low=None, low_open: bool = True, text: str = "") -> ParamDecl:
    return ParamDecl(name=name, value=Fraction(value), low=None if low is None else Fraction(low),
                     low_open=low_open, exclude=[Fraction(e) for e in exclude], range_text=text)


def _decls(*items: ParamDecl) -> Dict[str, ParamDecl]:
    return {d.name: d for d in items}


def _caputo_grid(*space: str) -> Dict[str, List[float]]:
    grid = {"t": [0.1, 1.0, 5]}
    grid.update({v: [0.1, 1.0, 5] for v in space})
    return grid


# --- Riemann-Liouville systems with t^(-alpha) solutions ------------------------------------

def burgers_coupled() -> ProblemSpec:
    g = "gamma(1+beta)"
    return ProblemSpec(
        id="burgers-coupled",
        title="coupled generalized nonlinear fractional Burgers equations",
        provenance="generalized Burgers system in one space variable; power-law solution corrected",
        variables=["x"],
        components=["f", "g"],
        params=_decls(
            _order("alpha", Fraction(3, 10), high_open=True, exclude=[Fraction(1, 2)], text="alpha in (0,1)\\{1/2}"),
            _order("beta", Fraction(4, 5), text="beta in (0,1]"),
            _scalar("a0", -1), _scalar("a1", -2, exclude=[0], text="a1 != 0"), _scalar("a2", 1),
            _scalar("b0", -1), _scalar("b1", -2), _scalar("b2", 1),
        ),
        time_kind=RIEMANN_LIOUVILLE,
        time_operator={"f": [("1", "alpha", 1)], "g": [("1", "alpha", 1)]},
        operators=[
            "-a0*D(f,x,beta,2) - a1*f*D(f,x,beta) - a2*(f*D(g,x,beta) + g*D(f,x,beta))",
            "-b0*D(g,x,beta,2) - b1*g*D(g,x,beta) - b2*(g*D(f,x,beta) + f*D(g,x,beta))",
        ],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["1", "x^beta"], ["1", "x^beta"]],
            symbols=[["K1", "K2"], ["L1", "L2"]],
            psi=[[f"-{g}*(a1*K1*K2 + a2*K1*L2 + a2*L1*K2)", f"-{g}*(a1*K2^2 + 2*a2*K2*L2)"],
                 [f"-{g}*(b1*L1*L2 + b2*K1*L2 + b2*L1*K2)", f"-{g}*(b1*L2^2 + 2*b2*K2*L2)"]],
            solution={"K1": "M1*t^(-alpha)",
                      "K2": f"-rlrate(alpha)/(a1*{g})*t^(-alpha)",
                      "L1": "0",
                      "L2": "0"},
            solution_source="branch g = 0 of the power-law family; the two-component form fails the f-equation",
        )},
        free_constants={"M1": 1.0},
        grid={"t": [0.5, 2.0, 5], "x": [0.1, 2.0, 5]},
    )


def kdv_system() -> ProblemSpec:
    g = "gamma(1+beta)"
    return ProblemSpec(
        id="kdv-system",
        title="coupled time fractional KdV system",
        provenance="coupled KdV system; power-law solution family with a sign branch",
        variables=["x"],
        components=["f", "g"],
        params=_decls(
            _order("alpha", Fraction(3, 10), exclude=[Fraction(1, 2)], text="alpha in (0,1]\\{1/2}"),
            _order("beta", 1, text="beta in (0,1]"),
            _scalar("a1", 2), _scalar("a2", 4, low=0, text="a2 > 0"), _scalar("a3", 1),
            _scalar("b1", 2), _scalar("b2", 1), _scalar("b3", 1),
        ),
        time_kind=RIEMANN_LIOUVILLE,
        time_operator={"f": [("1", "alpha", 1)], "g": [("1", "alpha", 1)]},
        operators=[
            "a1*f*D(f,x,beta) + a2*g*D(g,x,beta) + a3*D(f,x,beta,3)",
            "b1*f*D(g,x,beta) + b2*g*D(f,x,beta) + b3*D(g,x,beta,3)",
        ],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["1", "x^beta"], ["1", "x^beta"]],
            symbols=[["K1", "K2"], ["L1", "L2"]],
            psi=[[f"{g}*(a1*K1*K2 + a2*L1*L2)", f"{g}*(a1*K2^2 + a2*L2^2)"],
                 [f"{g}*(b1*K1*L2 + b2*L1*K2)", f"{g}*(b1+b2)*K2*L2"]],
            solution={
                "K1": "sigma*sqrt(a2/(b1+b2-a1))*M1*t^(-alpha)",
                "K2": f"rlrate(alpha)/((b1+b2)*{g})*t^(-alpha)",
                "L1": "M1*t^(-alpha)",
                "L2": f"sigma*sqrt(b1+b2-a1)*rlrate(alpha)/((b1+b2)*sqrt(a2)*{g})*t^(-alpha)",
            },
            solution_source="power-law family; sigma = -1 gives the classical alpha = 1 form",
        )},
        free_constants={"M1": 1.0, "sigma": 1.0},
        constraints=["b1 + b2 > a1", "a2 > 0"],
        constraint_text="b1 + b2 > a1, a2 > 0",
        grid={"t": [0.5, 2.0, 5], "x": [0.1, 2.0, 5]},
    )


# --- Caputo systems ---------------------------------------------------------------------------

def coupled_system() -> ProblemSpec:
    return ProblemSpec(
        id="coupled-system",
        title="coupled nonlinear system with two time orders per component",
        provenance="two-component system with time orders alpha and alpha+1 per component",
        variables=["x"],
        components=["f", "g"],
        params=_decls(
            _order("alpha1", Fraction(1, 2), text="alpha1 in (0,1]"),
            _order("alpha2", Fraction(7, 10), text="alpha2 in (0,1]"),
            _order("beta", Fraction(4, 5), text="beta in (0,1]"),
            _scalar("a1", Fraction(1, 2)), _scalar("a2", 1), _scalar("m1", 1), _scalar("n1", 1),
            _scalar("n2", Fraction(1, 4)),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha1", 1), ("1", "alpha1+1", 1)],
                       "g": [("1", "alpha2", 1), ("1", "alpha2+1", 1)]},
        operators=[
            "D(f,x,beta,2) + m1*g*D(g,x,beta) + a1*m1*g^2",
            "D(g,x,beta,2) + n1*D(f,x,beta,2) + a2^2*n1*f + n2*g",
        ],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["sin(x,beta,a2)", "cos(x,beta,a2)"], ["E(x,beta,-a1)"]],
            symbols=[["K1", "K2"], ["L1"]],
            psi=[["-a2^2*K1", "-a2^2*K2"], ["(a1^2+n2)*L1"]],
            initial={"K1": ["c1", "d1"], "K2": ["c2", "d2"], "L1": ["c3", "d3"]},
            solution={
                "K1": "twoorder(t,alpha1+1,alpha1,1,-a2^2,c1,d1)",
                "K2": "twoorder(t,alpha1+1,alpha1,1,-a2^2,c2,d2)",
                "L1": "twoorder(t,alpha2+1,alpha2,1,a1^2+n2,c3,d3)",
            },
            solution_source="Laplace solution of D^(a+1)K + D^(a)K = lam K as an eps_m series",
        )},
        free_constants={"c1": 1.0, "d1": 0.0, "c2": 0.5, "d2": 1.0, "c3": 1.0, "d3": -0.5},
        grid=_caputo_grid("x"),
    )


def boussinesq_system() -> ProblemSpec:
    g = "gamma(1+beta)"
    return ProblemSpec(
        id="boussinesq-system",
        title="time fractional coupled Boussinesq system",
        provenance="coupled Boussinesq system with f(0,x) = e + 2x, g(0,x) = 3/2",
        variables=["x"],
        components=["f", "g"],
        params=_decls(
            _order("alpha1", Fraction(2, 5), text="alpha1 in (0,1]"),
            _order("alpha2", Fraction(7, 10), text="alpha2 in (0,1]"),
            _order("beta", Fraction(9, 10), text="beta in (0,1]"),
            _scalar("m1", 1), _scalar("m2", 1),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha1", 1)], "g": [("1", "alpha2", 1)]},
        operators=[
            "-D(g,x,beta)",
            "-m1*D(f,x,beta) + 3*f*D(f,x,beta) + m2*D(f,x,beta,3)",
        ],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["1", "x^beta"], ["1", "x^beta"]],
            symbols=[["K1", "K2"], ["L1", "L2"]],
            psi=[[f"-{g}*L2", "0"], [f"{g}*(-m1*K2 + 3*K1*K2)", f"3*{g}*K2^2"]],
            initial={"K1": ["e"], "K2": ["2"], "L1": ["3/2"], "L2": ["0"]},
            solution={
                "K1": f"e - 12*{g}^2/gamma(1+alpha1+alpha2)*t^(alpha1+alpha2)",
                "K2": "2",
                "L1": (f"3/2 - 2*m1*{g}/gamma(1+alpha2)*t^alpha2 + 6*e*{g}/gamma(1+alpha2)*t^alpha2"
                       f" - 72*{g}^3/gamma(1+alpha1+2*alpha2)*t^(alpha1+2*alpha2)"),
                "L2": f"12*{g}/gamma(1+alpha2)*t^alpha2",
            },
            solution_source="explicit solution polynomial in t^alpha1 and t^alpha2",
        )},
        classical=ClassicalLimit(
            params={"alpha1": "3/5", "alpha2": "3/5", "beta": "1"},
            fields={
                "f": "e - 12*t^(2*alpha1)/gamma(1+2*alpha1) + 2*x",
                "g": ("3/2 - 2*m1*t^alpha1/gamma(1+alpha1) + 6*e*t^alpha1/gamma(1+alpha1)"
                      " - 72*t^(3*alpha1)/gamma(1+3*alpha1) + 12*t^alpha1/gamma(1+alpha1)*x"),
            },
            source="classical coupled Boussinesq form with a = e, b = 2, c = 3/2, d = 0",
        ),
        grid=_caputo_grid("x"),
    )


def dispersive_kdv(n: int = 2) -> ProblemSpec:
    if n < 1:
        raise UnknownExample(f"dispersive-kdv needs n >= 1 space variables, got {n}")
    xs = [f"x{i}" for i in range(1, n + 1)]
    params = [_order("alpha", Fraction(4, 5), text="alpha in (0,1]")]
    for i in range(1, n + 1):
        params.append(_order(f"beta{i}", Fraction(7, 10) if i % 2 else Fraction(9, 10), text=f"beta{i} in (0,1]"))
    for i in range(1, n + 1):
        params.append(_scalar(f"lambda{i}", i))
    for i in range(1, n + 1):
        params.append(_scalar(f"a{i}", 1))
    deriv = " + ".join(f"D(f,{x},beta{i},3)" for i, x in enumerate(xs, 1))

    trig_basis, trig_syms, trig_psi = [], [], []
    trig_init, trig_sol = {}, {}
    ml_basis, ml_syms, ml_psi, ml_init, ml_sol = [], [], [], {}, {}
    for i, x in enumerate(xs, 1):
        k1, k2 = f"K{i}1", f"K{i}2"
        trig_basis += [f"cos({x},beta{i},lambda{i})", f"sin({x},beta{i},lambda{i})"]
        trig_syms += [k1, k2]
        trig_psi += [f"lambda{i}^3*{k2}", f"-lambda{i}^3*{k1}"]
        trig_init.update({k1: ["0"], k2: [f"a{i}"]})
        trig_sol.update({k1: f"a{i}*sin(t,alpha,lambda{i}^3)", k2: f"a{i}*cos(t,alpha,lambda{i}^3)"})
        k = f"K{i}"
        ml_basis.append(f"E({x},beta{i},lambda{i})")
        ml_syms.append(k)
        ml_psi.append(f"-lambda{i}^3*{k}")
        ml_init[k] = [f"a{i}"]
        ml_sol[k] = f"a{i}*E(t,alpha,-lambda{i}^3)"

    return ProblemSpec(
        id="dispersive-kdv",
        title="n-dimensional time fractional dispersive KdV equation",
        provenance="n-dimensional dispersive KdV equation; fractional trigonometric solution, n = 2 by default",
        variables=xs,
        components=["f"],
        params=_decls(*params),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha", 1)]},
        operators=[f"-({deriv})"],
        subspaces={
            PRIMARY_SUBSPACE: SubspaceSpec(
                basis=[trig_basis], symbols=[trig_syms], psi=[trig_psi], initial=trig_init, solution=trig_sol,
                solution_source="fractional sine and cosine in t",
            ),
            "ml": SubspaceSpec(
                basis=[ml_basis], symbols=[ml_syms], psi=[ml_psi], initial=ml_init, solution=ml_sol,
                solution_source="exponential subspace; the sign of the argument is -lambda^3",
            ),
        },
        grid=_caputo_grid(*xs),
        structure={"n": n},
    )


def population() -> ProblemSpec:
    source = "(a2^2*gamma(2*beta+1) + a3^2*gamma(2*gamma+1))*E(t,alpha,c)^2"
    return ProblemSpec(
        id="population",
        title="time fractional biological population model",
        provenance="biological population model in two space variables; solution by NIM",
        variables=["x", "y"],
        components=["f"],
        params=_decls(
            _order("alpha", Fraction(4, 5), text="alpha in (0,1]"),
            _order("beta", 1, text="beta in (0,1]"),
            _order("gamma", 1, text="gamma in (0,1]"),
            _scalar("c", 1),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha", 1)]},
        operators=["D(f^2,x,beta,2) + D(f^2,y,gamma,2) + c*f"],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["1", "x^beta", "y^gamma"]],
            symbols=[["K1", "K2", "K3"]],
            psi=[["c*K1 + gamma(2*beta+1)*K2^2 + gamma(2*gamma+1)*K3^2", "c*K2", "c*K3"]],
            initial={"K1": ["a1"], "K2": ["a2"], "K3": ["a3"]},
            solution={"K1": SERIES_SOLUTION, "K2": "a2*E(t,alpha,c)", "K3": "a3*E(t,alpha,c)"},
            solution_source="K2, K3 Mittag-Leffler; K1 from the NIM iteration K = g0 + c I^alpha K",
            nim=NIMSpec(unknown="K1", constant="a1", source=source, c="c", order="alpha"),
        )},
        free_constants={"a1": 1.0, "a2": 1.0, "a3": 1.0},
        grid=_caputo_grid("x", "y"),
    )


def scale_wave() -> ProblemSpec:
    return ProblemSpec(
        id="scale-wave",
        title="time fractional wave equation with damping on two space scales",
        provenance="damped wave equation on two space scales; two-order solution corrected",
        variables=["x", "y"],
        components=["f"],
        params=_decls(
            _order("alpha", Fraction(3, 5), text="alpha in (0,1]"),
            _order("beta", Fraction(7, 10), text="beta in (0,1]"),
            _order("gamma", Fraction(4, 5), text="gamma in (0,1]"),
            _scalar("a", 1), _scalar("lambda1", Fraction(1, 2)), _scalar("lambda2", Fraction(1, 4)),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("a", "alpha", 1), ("1", "alpha+1", 1)]},
        operators=["D(f,x,beta,2) + D(f,y,gamma,2)"],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["E(x,beta,lambda1)", "E(y,gamma,-lambda2)"]],
            symbols=[["K1", "K2"]],
            psi=[["lambda1^2*K1", "lambda2^2*K2"]],
            initial_functions={"f": ["p1*E(x,beta,lambda1) + p2*E(y,gamma,-lambda2)",
                                     "q1*E(x,beta,lambda1) + q2*E(y,gamma,-lambda2)"]},
            solution={
                "K1": "twoorder(t,alpha+1,alpha,a,lambda1^2,p1,q1)",
                "K2": "twoorder(t,alpha+1,alpha,a,lambda2^2,p2,q2)",
            },
            solution_source="two-order solution with lambda_j^2 for basis function j",
        )},
        free_constants={"p1": 1.0, "q1": 0.0, "p2": 1.0, "q2": 0.0},
        grid=_caputo_grid("x", "y"),
    )


def boussinesq_2d() -> ProblemSpec:
    return ProblemSpec(
        id="boussinesq-2d",
        title="two dimensional time fractional Boussinesq equation",
        provenance="two dimensional Boussinesq equation with f(0,x,y) = 9/5 + e^2 y",
        variables=["x", "y"],
        components=["f"],
        params=_decls(
            _order("alpha", Fraction(7, 10), text="alpha in (0,1]"),
            _order("beta", Fraction(4, 5), text="beta in (0,1]"),
            _order("gamma", Fraction(3, 5), text="gamma in (0,1]"),
            _scalar("r", 1), _scalar("s", 0),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha", 1)]},
        operators=["D((r*f+s)*D(r*f+s,x,beta),x,beta) + D((r*f+s)*D(r*f+s,y,gamma),y,gamma)"],
        subspaces={
            PRIMARY_SUBSPACE: SubspaceSpec(
                basis=[["1", "x^beta", "y^gamma"]],
                symbols=[["K1", "K2", "K3"]],
                psi=[["r^2*(gamma(beta+1)^2*K2^2 + gamma(gamma+1)^2*K3^2)", "0", "0"]],
                initial={"K1": ["9/5"], "K2": ["0"], "K3": ["e^2"]},
                solution={"K1": "9/5 + e^4*r^2*gamma(gamma+1)^2/gamma(alpha+1)*t^alpha", "K2": "0", "K3": "e^2"},
                solution_source="explicit solution linear in t^alpha",
            ),
            "quartic": SubspaceSpec(
                basis=[["1", "x^(2*beta)", "y^(2*gamma)", "x^beta*y^gamma"]],
                symbols=[["K1", "K2", "K3", "K4"]],
                psi=[[
                    "r*(r*K1+s)*(gamma(2*beta+1)*K2 + gamma(2*gamma+1)*K3)",
                    "r^2*(gamma(3*beta+1)/gamma(beta+1)*K2^2 + gamma(2*gamma+1)*K2*K3 + gamma(gamma+1)^2*K4^2)",
                    "r^2*(gamma(3*gamma+1)/gamma(gamma+1)*K3^2 + gamma(2*beta+1)*K2*K3 + gamma(beta+1)^2*K4^2)",
                    ("r^2*K4*((gamma(2*beta+1)^2/gamma(beta+1)^2 + gamma(2*beta+1))*K2"
                     " + (gamma(2*gamma+1)^2/gamma(gamma+1)^2 + gamma(2*gamma+1))*K3)"),
                ]],
                invariance_only=True,
                solution_source="second invariant subspace of degree four; no closed form",
            ),
        },
        classical=ClassicalLimit(
            params={"alpha": "1", "beta": "1", "gamma": "1"},
            fields={"f": "9/5 + e^4*r^2*t + e^2*y"},
            source="classical two dimensional heat and mass transfer form",
        ),
        grid=_caputo_grid("x", "y"),
    )


def diffusion_like() -> ProblemSpec:
    lam = "gamma(2*gamma+1)*gamma(2*beta+1)/4"
    return ProblemSpec(
        id="diffusion-like",
        title="time fractional diffusion-like equation with variable coefficients",
        provenance="diffusion-like equation with variable coefficients; Mittag-Leffler solution corrected",
        variables=["x", "y"],
        components=["f"],
        params=_decls(
            _order("alpha", Fraction(3, 5), text="alpha in (0,1]"),
            _order("beta", Fraction(7, 10), text="beta in (0,1]"),
            _order("gamma", Fraction(4, 5), text="gamma in (0,1]"),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha", 1)]},
        operators=["(x^(2*beta)*D(f,y,gamma,2) + y^(2*gamma)*D(f,x,beta,2))/2"],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["1", "x^(2*beta)", "y^(2*gamma)"]],
            symbols=[["K1", "K2", "K3"]],
            psi=[["0", "gamma(2*gamma+1)/2*K3", "gamma(2*beta+1)/2*K2"]],
            initial={"K1": ["0"], "K2": ["0"], "K3": ["1"]},
            solution={
                "K1": "0",
                "K2": f"gamma(2*gamma+1)/2*ml(t,2*alpha,alpha+1,{lam})",
                "K3": f"ml(t,2*alpha,1,{lam})",
            },
            solution_source="Mittag-Leffler solution with the argument of its own reduced system",
        )},
        classical=ClassicalLimit(
            params={"alpha": "1", "beta": "1", "gamma": "1"},
            fields={"f": "sinh(t)*x^2 + cosh(t)*y^2"},
            source="sinh(t) x^2 + cosh(t) y^2",
        ),
        grid=_caputo_grid("x", "y"),
    )


def mixed() -> ProblemSpec:
    return ProblemSpec(
        id="mixed",
        title="coupled system with mixed space-time fractional derivatives",
        provenance="coupled system with mixed space-time derivatives; solution corrected",
        variables=["x"],
        components=["f", "g"],
        params=_decls(
            _order("alpha1", Fraction(7, 10), text="alpha1 in (0,1]"),
            _order("alpha2", Fraction(4, 5), text="alpha2 in (0,1]"),
            _order("beta", Fraction(9, 10), text="beta in (0,1]"),
            _order("gamma", Fraction(3, 10), high_open=True, text="gamma in (0,1)"),
            _scalar("a1", Fraction(1, 2)), _scalar("a2", 1), _scalar("m1", 1), _scalar("n1", 1),
            _scalar("n2", Fraction(1, 2)),
        ),
        time_kind=CAPUTO,
        time_operator={"f": [("1", "alpha1", 1)], "g": [("1", "alpha2", 1)]},
        operators=[
            "Dt(D(f,x,beta,2),gamma) + m1*g*D(g,x,beta) + a1*m1*g^2",
            "Dt(D(g,x,beta,2),gamma) + n1*D(f,x,beta,2) - a2^2*n1*f + n2*g",
        ],
        subspaces={PRIMARY_SUBSPACE: SubspaceSpec(
            basis=[["E(x,beta,a2)", "E(x,beta,-a2)"], ["E(x,beta,-a1)"]],
            symbols=[["K1", "K2"], ["L1"]],
            psi=[["a2^2*Dt(K1,gamma)", "a2^2*Dt(K2,gamma)"], ["a1^2*Dt(L1,gamma) + n2*L1"]],
            initial={"K1": ["b1"], "K2": ["b2"], "L1": ["c1"]},
            solution={"K1": "b1", "K2": "b2", "L1": "twoorder(t,alpha2,gamma,-a1^2,n2,c1)"},
            solution_source="K1, K2 constant (their series telescope); L1 from D^(alpha2)L - a1^2 D^(gamma)L = n2 L",
        )},
        free_constants={"b1": 1.0, "b2": 0.5, "c1": 1.0},
        constraints=["gamma < alpha1", "gamma < alpha2"],
        constraint_text="gamma < alpha1, gamma < alpha2",
        draw_constraints=["alpha1 - gamma >= 3/10", "alpha2 - gamma >= 3/10"],
        grid=_caputo_grid("x"),
    )


_FACTORIES: Dict[str, Callable[..., ProblemSpec]] = {
    "burgers-coupled": burgers_coupled,
    "coupled-system": coupled_system,
    "boussinesq-system": boussinesq_system,
    "kdv-system": kdv_system,
    "dispersive-kdv": dispersive_kdv,
    "population": population,
    "scale-wave": scale_wave,
    "boussinesq-2d": boussinesq_2d,
    "diffusion-like": diffusion_like,
    "mixed": mixed,
}

# structural sizes accepted by a factory, e.g. the number of space variables
STRUCTURAL_PARAMS: Dict[str, List[str]] = {"dispersive-kdv": ["n"]}


def example_ids() -> List[str]:
    return list(_FACTORIES)


def problem_spec(example_id: str, structure: Optional[Dict[str, int]] = None) -> ProblemSpec:
    """A fresh ProblemSpec for a catalog id.

    Raises:
        UnknownExample: the id is not in the catalog, or a structural size is not accepted.
    """
    factory = _FACTORIES.get(example_id)
    if factory is None:
        raise UnknownExample(f"Unknown example '{example_id}'. Known: {', '.join(_FACTORIES)}")
    structure = dict(structure or {})
    allowed = STRUCTURAL_PARAMS.get(example_id, [])
    extra = [k for k in structure if k not in allowed]
    if extra:
        raise UnknownExample(f"{example_id} takes no structural parameter {extra}")
    return factory(**structure)
