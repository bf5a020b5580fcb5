namespace eikjohn {
}
