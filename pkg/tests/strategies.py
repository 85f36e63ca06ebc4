"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from heisentrace.symexpr import FUNCTIONS, BinOp, Call, Const, Neg, Norm2, Num, Var

names = st.sampled_from(["x1", "x2", "r", "theta1"])
leaves = st.one_of(
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.sampled_from(["i", "pi"]).map(Const),
    names.map(Var),
    st.just(Norm2()),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from(FUNCTIONS), children).map(lambda t: Call(*t)),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
    )


asts = st.recursive(leaves, _extend, max_leaves=12)
