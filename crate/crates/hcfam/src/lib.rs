pub mod classify;
pub mod exactalg;
pub mod grassfam;
pub mod hcmod;
pub mod liefam;
pub mod sl2fam;
pub mod suite;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/scalars.md")]
    struct Scalars;
    #[doc = include_str!("../../../book/src/families.md")]
    struct Families;
    #[doc = include_str!("../../../book/src/modules.md")]
    struct Modules;
    #[doc = include_str!("../../../book/src/classification.md")]
    struct Classification;
    #[doc = include_str!("../../../book/src/grassmann.md")]
    struct Grassmann;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
