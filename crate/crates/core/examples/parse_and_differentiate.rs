//! Parse a component expression and read off its value, gradient and Hessian.

use skewprod::expr::{eval_jet, parse_str, Bindings};

fn main() {
    let names = vec!["x".to_string(), "u".to_string()];
    let e = parse_str("x^3*sin(u) + sqrt(1 + x^2)").unwrap();
    println!("parsed: {e}");

    let at = [2.0, 0.7];
    let j = eval_jet(&e, &Bindings::new(&names, &at)).unwrap();
    println!("value    {:.12}", j.value);
    println!("gradient {:.12?}", j.grad);
    for i in 0..2 {
        println!("hess[{i}]  [{:.12}, {:.12}]", j.hess_at(i, 0), j.hess_at(i, 1));
    }

    // malformed input is an error with a byte offset, never a panic
    for bad in ["x ++ u", "sin(x, u)", "x^0.5", "cosh(x)"] {
        let err = parse_str(bad).unwrap_err();
        println!("{bad:>10}  ->  {err}");
    }
}
