public Profile loadProfile(String userId) {
    User user = userRepository.findById(userId);
    return new Profile(user.getName(), user.getEmail());
}
