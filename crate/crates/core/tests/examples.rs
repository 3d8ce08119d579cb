mod stability_index {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stability_index.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod laplace_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/laplace_oracle.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod sampler_cross_validation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sampler_cross_validation.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod continuity_and_increments {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/continuity_and_increments.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod mfpp_mittag_leffler {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mfpp_mittag_leffler.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod tail_normalization {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tail_normalization.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod ctrw_convergence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ctrw_convergence.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}

mod sample_paths {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sample_paths.rs"));

    #[test]
    fn runs() {
        main().expect("example should run");
    }
}
