use std::fmt::Write;

use super::ast::Program;
use crate::prob::format_rational;

const PAR: u8 = 1;
const CHOICE: u8 = 2;
const SEQ: u8 = 3;
const NEG: u8 = 4;
const POSTFIX: u8 = 5;

/// Prints `p` in the ASCII concrete syntax with the minimum parentheses
/// needed for [`parse`](super::parse) to rebuild the same tree.
pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    write_prog(&mut out, p, 0);
    out
}

fn write_prog(out: &mut String, p: &Program, ctx: u8) {
    use Program::*;
    let own = match p {
        Par(..) => PAR,
        Choice(..) => CHOICE,
        Seq(..) => SEQ,
        Neg(_) => NEG,
        Star(_) | BoundedStar(..) => POSTFIX,
        // Sugar forms extend as far right as possible; parenthesize unless
        // they are the whole program.
        If(..) | While(..) => 0,
        _ => u8::MAX,
    };
    let paren = own < ctx || (own == 0 && ctx > 0);
    if paren {
        out.push('(');
    }
    match p {
        Drop => out.push_str("drop"),
        Skip => out.push_str("skip"),
        Dup => out.push_str("dup"),
        Test(f, n) => {
            let _ = write!(out, "{f}={n}");
        }
        Mod(f, n) => {
            let _ = write!(out, "{f}:={n}");
        }
        Neg(q) => {
            out.push('~');
            write_prog(out, q, NEG);
        }
        Par(a, b) => {
            write_prog(out, a, PAR);
            out.push_str(" & ");
            write_prog(out, b, PAR + 1);
        }
        Choice(r, a, b) => {
            write_prog(out, a, CHOICE);
            let _ = write!(out, " +[{}] ", format_rational(r));
            write_prog(out, b, CHOICE + 1);
        }
        Seq(a, b) => {
            write_prog(out, a, SEQ);
            out.push_str("; ");
            write_prog(out, b, SEQ + 1);
        }
        Star(q) => {
            write_prog(out, q, POSTFIX);
            out.push('*');
        }
        BoundedStar(n, q) => {
            write_prog(out, q, POSTFIX);
            let _ = write!(out, "^({n})");
        }
        If(a, b, c) => {
            out.push_str("if ");
            write_prog(out, a, PAR);
            out.push_str(" then ");
            write_prog(out, b, PAR);
            out.push_str(" else ");
            write_prog(out, c, PAR);
        }
        While(a, b) => {
            out.push_str("while ");
            write_prog(out, a, PAR);
            out.push_str(" do ");
            write_prog(out, b, PAR);
        }
    }
    if paren {
        out.push(')');
    }
}
