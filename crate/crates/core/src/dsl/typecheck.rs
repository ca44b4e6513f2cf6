use super::ast::Program;
use super::pretty::pretty;
use crate::error::KindError;

/// Stratification of terms: predicates are the negation-closed fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Predicate,
    Command,
}

/// Returns `Predicate` iff `p` is built from `drop`, `skip`, tests, `&`,
/// `;` and `¬` only. Fails when negation is applied to a command or a
/// conditional/loop guard is a command.
pub fn typecheck(p: &Program) -> Result<Kind, KindError> {
    use Program::*;
    Ok(match p {
        Drop | Skip | Test(..) => Kind::Predicate,
        Mod(..) | Dup => Kind::Command,
        Neg(q) => {
            if typecheck(q)? != Kind::Predicate {
                return Err(KindError {
                    subterm: pretty(p),
                    reason: format!("negation of non-predicate `{}`", pretty(q)),
                });
            }
            Kind::Predicate
        }
        Par(a, b) | Seq(a, b) => join(typecheck(a)?, typecheck(b)?),
        Choice(_, a, b) => {
            typecheck(a)?;
            typecheck(b)?;
            Kind::Command
        }
        Star(q) | BoundedStar(_, q) => {
            typecheck(q)?;
            Kind::Command
        }
        If(a, q, r) => {
            guard(p, a)?;
            join(typecheck(q)?, typecheck(r)?)
        }
        While(a, q) => {
            guard(p, a)?;
            typecheck(q)?;
            Kind::Command
        }
    })
}

fn join(a: Kind, b: Kind) -> Kind {
    if a == Kind::Predicate && b == Kind::Predicate {
        Kind::Predicate
    } else {
        Kind::Command
    }
}

fn guard(whole: &Program, cond: &Program) -> Result<(), KindError> {
    if typecheck(cond)? != Kind::Predicate {
        return Err(KindError {
            subterm: pretty(whole),
            reason: format!("condition `{}` is not a predicate", pretty(cond)),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn kind(s: &str) -> Result<Kind, KindError> {
        typecheck(&parse(s).unwrap())
    }

    #[test]
    fn predicates_and_commands() {
        assert_eq!(kind("~(f=1 & g=2)").unwrap(), Kind::Predicate);
        assert_eq!(kind("skip; drop & ~f=0").unwrap(), Kind::Predicate);
        assert_eq!(kind("f:=1").unwrap(), Kind::Command);
        assert_eq!(kind("f=1 +[1/2] f=2").unwrap(), Kind::Command);
        assert_eq!(kind("if f=1 then skip else g=2").unwrap(), Kind::Predicate);
    }

    #[test]
    fn negated_star_is_rejected() {
        let e = kind("~(f:=1*)").unwrap_err();
        assert_eq!(e.subterm, "~f:=1*");
        assert!(e.reason.contains("non-predicate"));
        assert!(kind("~(skip*)").is_err());
        assert!(kind("~dup").is_err());
    }

    #[test]
    fn guards_must_be_predicates() {
        assert!(kind("while f:=1 do skip").is_err());
        assert!(kind("if dup then skip else skip").is_err());
        assert!(kind("~(f=1; f:=2)").is_err());
    }
}
