"""Built-in example programs, each with a point where it is smooth."""

from dataclasses import dataclass


@dataclass(frozen=True)
class CannedExample:
    source: str
    params: tuple
    point: tuple


_EXAMPLES = {
    "running-example": CannedExample("ln(x1) + x1*x2 - sin(x2)", ("x1", "x2"), (2.0, 5.0)),
    "abs-branch": CannedExample(
        "params x\nif x < 0:\n  y = -x\nelse:\n  y = x\nend\nreturn y\n", ("x",), (3.0,)
    ),
    "power-loop": CannedExample(
        "params x\ns = 1\nrepeat 4:\n  s = s * x\nend\nreturn s\n", ("x",), (2.0,)
    ),
    "quadratic": CannedExample("x1^2 + x2^2", ("x1", "x2"), (1.0, -2.0)),
    "shifted-square": CannedExample("(x - 3)^2", ("x",), (0.0,)),
    "rosenbrock": CannedExample("(1 - x)^2 + 100*(y - x^2)^2", ("x", "y"), (-1.2, 1.0)),
    "trig-mix": CannedExample("sin(a)*cos(b) + tan(a*b/4)", ("a", "b"), (0.7, 1.3)),
    "exp-ratio": CannedExample("exp(-x^2) / (1 + y^2) + sqrt(x + 2*y)", ("x", "y"), (0.4, 0.9)),
    "logistic-loss": CannedExample(
        "ln(1 + exp(-(w1*0.5 + w2*1.5))) + ln(1 + exp(w1*2 - w2))", ("w1", "w2"), (0.3, -0.2)
    ),
    "newton-sqrt": CannedExample(
        "params a\nr = a\nrepeat 6:\n  r = 0.5 * (r + a / r)\nend\nreturn r\n", ("a",), (2.0,)
    ),
    "piecewise": CannedExample(
        "params x, y\nif x*y > 1:\n  z = x*y - 1\nelse:\n  z = (x*y - 1)^3\nend\nreturn z + ln(x)\n",
        ("x", "y"), (1.5, 2.0),
    ),
    "two-outputs": CannedExample("params x, y\nreturn x*y, sin(x) + y^3\n", ("x", "y"), (0.5, 1.5)),
    "power-tower": CannedExample("x^y + y^x", ("x", "y"), (1.3, 2.1)),
}


def canned_examples() -> dict:
    """Name -> :class:`CannedExample`, in a fixed order."""
    return dict(_EXAMPLES)
